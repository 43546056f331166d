#include "speclhs/validity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

#include "speclhs/cluster.hpp"
#include "speclhs/errors.hpp"
#include "speclhs/parallel.hpp"
#include "speclhs/rng.hpp"

namespace speclhs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> cluster_counts(const std::vector<int>& labels, int k) {
  std::vector<int> counts(k, 0);
  for (int l : labels) {
    if (l < 0 || l >= k) throw InvalidArgument("label out of range");
    ++counts[l];
  }
  return counts;
}

int label_span(const std::vector<int>& labels) {
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  return k;
}

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json score_to_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  return v;
}

}  // namespace

double silhouette_score(const Eigen::MatrixXd& points,
                        const std::vector<int>& labels) {
  const int n = static_cast<int>(points.rows());
  const int k = label_span(labels);
  const std::vector<int> counts = cluster_counts(labels, k);
  const int nonempty =
      static_cast<int>(std::count_if(counts.begin(), counts.end(),
                                     [](int c) { return c > 0; }));
  if (nonempty < 2) {
    throw SingleCluster("silhouette undefined for a single cluster");
  }

  double total = 0.0;
  std::vector<double> sums(k);
  for (int i = 0; i < n; ++i) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      sums[labels[j]] += (points.row(i) - points.row(j)).norm();
    }
    const int own = labels[i];
    if (counts[own] <= 1) continue;  // singleton contributes 0
    const double a = sums[own] / (counts[own] - 1);
    double b = kInf;
    for (int c = 0; c < k; ++c) {
      if (c == own || counts[c] == 0) continue;
      b = std::min(b, sums[c] / counts[c]);
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / n;
}

double calinski_harabasz_score(const Eigen::MatrixXd& points,
                               const std::vector<int>& labels) {
  const int n = static_cast<int>(points.rows());
  const int span = label_span(labels);
  const std::vector<int> counts = cluster_counts(labels, span);
  const int k =
      static_cast<int>(std::count_if(counts.begin(), counts.end(),
                                     [](int c) { return c > 0; }));
  if (k < 2) throw SingleCluster("CH index undefined for a single cluster");
  if (k >= n) throw InvalidArgument("CH index requires K < n");

  const Eigen::RowVectorXd grand = points.colwise().mean();
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(span, points.cols());
  for (int i = 0; i < n; ++i) means.row(labels[i]) += points.row(i);
  for (int c = 0; c < span; ++c) {
    if (counts[c] > 0) means.row(c) /= counts[c];
  }

  double between = 0.0;
  for (int c = 0; c < span; ++c) {
    if (counts[c] == 0) continue;
    between += counts[c] * (means.row(c) - grand).squaredNorm();
  }
  double within = 0.0;
  for (int i = 0; i < n; ++i) {
    within += (points.row(i) - means.row(labels[i])).squaredNorm();
  }
  if (within == 0.0) return kInf;
  return (between / (k - 1)) / (within / (n - k));
}

std::vector<double> composite_score(const std::vector<double>& silhouette,
                                    const std::vector<double>& ch) {
  if (silhouette.size() != ch.size()) {
    throw InvalidArgument("composite_score: length mismatch");
  }
  auto normalize = [](const std::vector<double>& v) {
    double lo = kInf, hi = -kInf;
    for (double x : v) {
      if (std::isfinite(x)) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    std::vector<double> out(v.size(), kNaN);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (std::isnan(v[i])) continue;
      if (std::isinf(v[i])) {
        out[i] = v[i] > 0 ? 1.0 : 0.0;
      } else if (hi > lo) {
        out[i] = (v[i] - lo) / (hi - lo);
      } else {
        out[i] = 0.5;  // constant metric
      }
    }
    return out;
  };
  const std::vector<double> ns = normalize(silhouette);
  const std::vector<double> nc = normalize(ch);
  std::vector<double> composite(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    composite[i] = 0.5 * (ns[i] + nc[i]);
  }
  return composite;
}

ValidityReport select_k(const FeatureMatrix& features, int k_min, int k_max,
                        const KernelConfig& config, std::uint64_t seed,
                        const SelectKOptions& options) {
  const int n = static_cast<int>(features.n());
  if (k_min < 2 || k_min > k_max || k_max > n - 1) {
    throw InvalidArgument("select_k: k range must lie within [2, N-1]");
  }

  ValidityReport report;
  for (int k = k_min; k <= k_max; ++k) report.k_values.push_back(k);
  const std::size_t m = report.k_values.size();
  report.silhouette.assign(m, kNaN);
  report.calinski_harabasz.assign(m, kNaN);

  parallel_for(m, options.threads, [&](std::size_t i) {
    const int k = report.k_values[i];
    try {
      const ClusterRun run =
          cluster_run(features, k, config, derive_seed(seed, k), 1);
      const Eigen::MatrixXd& pts =
          options.raw_space ? features.values : run.embedding;
      const std::vector<int>& labs =
          options.raw_space ? run.model.labels : run.embedding_labels;
      report.silhouette[i] = silhouette_score(pts, labs);
      report.calinski_harabasz[i] = calinski_harabasz_score(pts, labs);
    } catch (const Error&) {
      // recorded as missing; excluded from best_k
    }
  });

  report.composite = composite_score(report.silhouette,
                                     report.calinski_harabasz);
  int best = -1;
  double best_score = -kInf;
  for (std::size_t i = 0; i < m; ++i) {
    if (std::isnan(report.composite[i])) continue;
    if (report.composite[i] > best_score) {
      best_score = report.composite[i];
      best = report.k_values[i];
    }
  }
  if (best < 0) {
    throw InvalidArgument("select_k: every K in the range failed");
  }
  report.best_k = best;
  return report;
}

nlohmann::json validity_report_to_json(const ValidityReport& report) {
  nlohmann::json j;
  j["k_values"] = report.k_values;
  j["silhouette"] = nlohmann::json::array();
  j["calinski_harabasz"] = nlohmann::json::array();
  j["composite"] = nlohmann::json::array();
  for (std::size_t i = 0; i < report.k_values.size(); ++i) {
    j["silhouette"].push_back(score_to_json(report.silhouette[i]));
    j["calinski_harabasz"].push_back(
        score_to_json(report.calinski_harabasz[i]));
    j["composite"].push_back(score_to_json(report.composite[i]));
  }
  j["best_k"] = report.best_k;
  return j;
}

void write_validity_json(const std::string& path, const ValidityReport& r) {
  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << validity_report_to_json(r).dump(2) << "\n";
}

void write_validity_csv(const std::string& path, const ValidityReport& r) {
  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << "k,silhouette,calinski_harabasz,composite\n";
  for (std::size_t i = 0; i < r.k_values.size(); ++i) {
    out << r.k_values[i];
    for (double v : {r.silhouette[i], r.calinski_harabasz[i], r.composite[i]}) {
      out << ",";
      if (std::isnan(v)) {
        // missing score stays empty
      } else if (std::isinf(v)) {
        out << (v > 0 ? "inf" : "-inf");
      } else {
        out << format_g17(v);
      }
    }
    out << "\n";
  }
}

}  // namespace speclhs
