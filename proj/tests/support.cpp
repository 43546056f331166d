#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "speclhs/rng.hpp"

namespace testsupport {

LabeledPoints make_blobs(const std::vector<int>& sizes, int d, double sep,
                         double sigma, std::uint64_t seed) {
  const int k = static_cast<int>(sizes.size());
  if (k > (1 << d)) throw std::invalid_argument("make_blobs: k > 2^d");
  speclhs::Rng rng(seed);
  int total = 0;
  for (int s : sizes) total += s;
  LabeledPoints out;
  out.points.resize(total, d);
  out.labels.reserve(total);
  int row = 0;
  for (int c = 0; c < k; ++c) {
    for (int i = 0; i < sizes[c]; ++i) {
      for (int j = 0; j < d; ++j) {
        const double center = sep * ((c >> j) & 1);
        out.points(row, j) = center + sigma * rng.next_normal();
      }
      out.labels.push_back(c);
      ++row;
    }
  }
  return out;
}

LabeledPoints make_blobs(int k, int per, int d, double sep, double sigma,
                         std::uint64_t seed) {
  return make_blobs(std::vector<int>(k, per), d, sep, sigma, seed);
}

LabeledPoints make_rings(int per_ring, double r_inner, double r_outer,
                         double noise, std::uint64_t seed) {
  speclhs::Rng rng(seed);
  LabeledPoints out;
  out.points.resize(2 * per_ring, 2);
  out.labels.reserve(2 * per_ring);
  const double radii[2] = {r_inner, r_outer};
  int row = 0;
  for (int ring = 0; ring < 2; ++ring) {
    for (int i = 0; i < per_ring; ++i) {
      const double angle = 2.0 * M_PI * (i + rng.next_double()) / per_ring;
      const double r = radii[ring] + noise * rng.next_normal();
      out.points(row, 0) = r * std::cos(angle);
      out.points(row, 1) = r * std::sin(angle);
      out.labels.push_back(ring);
      ++row;
    }
  }
  return out;
}

double adjusted_rand_index(const std::vector<int>& a,
                           const std::vector<int>& b) {
  const std::size_t n = a.size();
  std::map<std::pair<int, int>, long> cont;
  std::map<int, long> row_sum, col_sum;
  for (std::size_t i = 0; i < n; ++i) {
    ++cont[{a[i], b[i]}];
    ++row_sum[a[i]];
    ++col_sum[b[i]];
  }
  auto comb2 = [](long m) { return 0.5 * m * (m - 1); };
  double index = 0.0, rows = 0.0, cols = 0.0;
  for (const auto& [key, m] : cont) index += comb2(m);
  for (const auto& [key, m] : row_sum) rows += comb2(m);
  for (const auto& [key, m] : col_sum) cols += comb2(m);
  const double all = comb2(static_cast<long>(n));
  const double expected = rows * cols / all;
  const double max_index = 0.5 * (rows + cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

double silhouette_oracle(const Eigen::MatrixXd& points,
                         const std::vector<int>& labels) {
  const int n = static_cast<int>(points.rows());
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> mean_dist(k, 0.0);
    std::vector<int> counts(k, 0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      mean_dist[labels[j]] += (points.row(i) - points.row(j)).norm();
      ++counts[labels[j]];
    }
    int own = 0;
    for (int j = 0; j < n; ++j) {
      if (j != i && labels[j] == labels[i]) ++own;
    }
    if (own == 0) continue;  // singleton contributes 0
    const double a = mean_dist[labels[i]] / own;
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == labels[i] || counts[c] == 0) continue;
      b = std::min(b, mean_dist[c] / counts[c]);
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / n;
}

double calinski_harabasz_oracle(const Eigen::MatrixXd& points,
                                const std::vector<int>& labels) {
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  Eigen::RowVectorXd grand = points.colwise().mean();
  std::vector<Eigen::RowVectorXd> mu(k, Eigen::RowVectorXd::Zero(d));
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) {
    mu[labels[i]] += points.row(i);
    ++counts[labels[i]];
  }
  double between = 0.0, within = 0.0;
  for (int c = 0; c < k; ++c) {
    mu[c] /= counts[c];
    between += counts[c] * (mu[c] - grand).squaredNorm();
  }
  for (int i = 0; i < n; ++i) {
    within += (points.row(i) - mu[labels[i]]).squaredNorm();
  }
  if (within == 0.0) return std::numeric_limits<double>::infinity();
  return (between / (k - 1)) / (within / (n - k));
}

namespace {

// independent type-7 quantile: h = p (m - 1) on the sorted column
std::vector<double> oracle_edges(std::vector<double> column, int n) {
  std::sort(column.begin(), column.end());
  const int m = static_cast<int>(column.size());
  std::vector<double> edges(n + 1);
  for (int q = 0; q <= n; ++q) {
    const double h = (static_cast<double>(q) / n) * (m - 1);
    const int lo = std::min<int>(static_cast<int>(std::floor(h)), m - 1);
    const int hi = std::min(lo + 1, m - 1);
    edges[q] = column[lo] + (h - lo) * (column[hi] - column[lo]);
  }
  for (int q = 1; q <= n; ++q) edges[q] = std::max(edges[q], edges[q - 1]);
  return edges;
}

int oracle_stratum(const std::vector<double>& edges, double v) {
  const int n = static_cast<int>(edges.size()) - 1;
  if (v <= edges[0]) return 0;
  for (int s = 0; s < n; ++s) {
    if (v > edges[s] && v <= edges[s + 1]) return s;
  }
  return n - 1;
}

}  // namespace

double clhs_objective_oracle(const Eigen::MatrixXd& candidates, int n,
                             const std::vector<int>& selected) {
  const int n_c = static_cast<int>(candidates.rows());
  const int d = static_cast<int>(candidates.cols());

  double o1 = 0.0;
  for (int j = 0; j < d; ++j) {
    std::vector<double> col(n_c);
    for (int i = 0; i < n_c; ++i) col[i] = candidates(i, j);
    const double lo = *std::min_element(col.begin(), col.end());
    const double hi = *std::max_element(col.begin(), col.end());
    if (lo == hi) continue;
    const std::vector<double> edges = oracle_edges(col, n);
    std::vector<int> counts(n, 0);
    for (int idx : selected) ++counts[oracle_stratum(edges, candidates(idx, j))];
    for (int c : counts) o1 += std::abs(c - 1);
  }

  auto pearson = [](const std::vector<double>& x, const std::vector<double>& y) {
    const int m = static_cast<int>(x.size());
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < m; ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= m;
    my /= m;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < m; ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
  };

  double o3 = 0.0;
  if (static_cast<int>(selected.size()) >= 3) {
    for (int a = 0; a < d; ++a) {
      for (int b = a + 1; b < d; ++b) {
        std::vector<double> fx(n_c), fy(n_c), sx, sy;
        for (int i = 0; i < n_c; ++i) {
          fx[i] = candidates(i, a);
          fy[i] = candidates(i, b);
        }
        for (int idx : selected) {
          sx.push_back(candidates(idx, a));
          sy.push_back(candidates(idx, b));
        }
        const double target = pearson(fx, fy);
        const double got = pearson(sx, sy);
        if (std::isnan(target) || std::isnan(got)) continue;
        o3 += std::abs(got - target);
      }
    }
  }
  return o1 + o3;
}

void for_each_subset(int n_c, int n,
                     const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> subset(n);
  for (int i = 0; i < n; ++i) subset[i] = i;
  while (true) {
    fn(subset);
    int pos = n - 1;
    while (pos >= 0 && subset[pos] == n_c - n + pos) --pos;
    if (pos < 0) break;
    ++subset[pos];
    for (int i = pos + 1; i < n; ++i) subset[i] = subset[i - 1] + 1;
  }
}

speclhs::SimilarityGraph random_graph(int n, double p, std::uint64_t seed) {
  speclhs::Rng rng(seed);
  speclhs::SimilarityGraph graph;
  graph.n_nodes = n;
  graph.adjacency.resize(n);
  std::vector<std::vector<std::pair<int, double>>>& adj = graph.adjacency;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.next_double() < p) {
        const double w = 0.2 + 0.8 * rng.next_double();
        adj[i].emplace_back(j, w);
        adj[j].emplace_back(i, w);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (adj[i].empty()) {
      int j = static_cast<int>(rng.next_index(n - 1));
      if (j >= i) ++j;
      const double w = 0.2 + 0.8 * rng.next_double();
      adj[i].emplace_back(j, w);
      adj[j].emplace_back(i, w);
    }
  }
  graph.degree.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    for (const auto& [j, w] : adj[i]) graph.degree[i] += w;
  }
  return graph;
}

int component_count(const speclhs::SimilarityGraph& graph) {
  const int n = graph.n_nodes;
  std::vector<char> seen(n, 0);
  int components = 0;
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    ++components;
    std::deque<int> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      const int i = queue.front();
      queue.pop_front();
      for (const auto& [j, w] : graph.adjacency[i]) {
        if (!seen[j]) {
          seen[j] = 1;
          queue.push_back(j);
        }
      }
    }
  }
  return components;
}

bool xml_well_formed(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (text[i] != '<') {
      ++i;
      continue;
    }
    if (text.compare(i, 2, "<?") == 0) {
      const std::size_t end = text.find("?>", i);
      if (end == std::string::npos) return false;
      i = end + 2;
      continue;
    }
    if (text.compare(i, 4, "<!--") == 0) {
      const std::size_t end = text.find("-->", i);
      if (end == std::string::npos) return false;
      i = end + 3;
      continue;
    }
    const std::size_t end = text.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(i + 1, end - i - 1);
    bool closing = false, self_closing = false;
    if (!tag.empty() && tag.front() == '/') {
      closing = true;
      tag = tag.substr(1);
    }
    if (!tag.empty() && tag.back() == '/') {
      self_closing = true;
      tag.pop_back();
    }
    // attribute quotes must be balanced inside the tag
    if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return false;
    const std::size_t space = tag.find_first_of(" \t\r\n");
    const std::string name =
        space == std::string::npos ? tag : tag.substr(0, space);
    if (name.empty()) return false;
    if (closing) {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else if (!self_closing) {
      stack.push_back(name);
    }
    i = end + 1;
  }
  return stack.empty();
}

int count_open_tags(const std::string& text, const std::string& tag) {
  int count = 0;
  std::size_t pos = 0;
  const std::string needle = "<" + tag;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    const char next = pos + needle.size() < text.size()
                          ? text[pos + needle.size()]
                          : '\0';
    if (next == ' ' || next == '>' || next == '/') ++count;
    pos += needle.size();
  }
  return count;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testsupport
