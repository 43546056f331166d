#include "speclhs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "speclhs/errors.hpp"
#include "speclhs/parallel.hpp"
#include "speclhs/rng.hpp"

namespace speclhs {

double rbf_weight(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                  double gamma) {
  return std::exp(-gamma * (x - y).squaredNorm());
}

double median_heuristic_gamma(const Eigen::MatrixXd& points, int knn,
                              std::uint64_t seed) {
  const int n = static_cast<int>(points.rows());
  const int probe = std::min(n, 1000);
  Rng rng(seed);
  std::vector<int> idx = rng.sample_without_replacement(n, probe);

  const int k = std::min(knn, probe - 1);
  if (k < 1) return 1.0;
  std::vector<double> kth(probe, 0.0);
  std::vector<double> dists(probe);
  for (int a = 0; a < probe; ++a) {
    for (int b = 0; b < probe; ++b) {
      dists[b] = a == b ? std::numeric_limits<double>::infinity()
                        : (points.row(idx[a]) - points.row(idx[b])).norm();
    }
    std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
    kth[a] = dists[k - 1];
  }
  std::nth_element(kth.begin(), kth.begin() + probe / 2, kth.end());
  const double med = kth[probe / 2];
  if (!(med > 0.0) || !std::isfinite(med)) return 1.0;
  return 1.0 / (2.0 * med * med);
}

SimilarityGraph build_knn_graph(const Eigen::MatrixXd& points,
                                const KernelConfig& config,
                                std::uint64_t seed, int threads) {
  const int n = static_cast<int>(points.rows());
  const int k = config.knn;
  if (k < 1) throw InvalidArgument("knn must be >= 1");
  if (n < k + 1) {
    throw InvalidArgument("build_knn_graph needs at least knn+1 points, got " +
                          std::to_string(n));
  }

  const double gamma = config.gamma
                           ? *config.gamma
                           : median_heuristic_gamma(points, k, seed);
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("gamma must be finite and positive");
  }

  // k nearest neighbors per node, ties broken by lower index.
  std::vector<std::vector<std::pair<int, double>>> nearest(n);
  std::vector<char> degenerate(n, 0);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    std::vector<std::pair<double, int>> cand;
    cand.reserve(n - 1);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      cand.emplace_back((points.row(i) - points.row(j)).squaredNorm(), j);
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    auto& out = nearest[i];
    out.reserve(k);
    for (int t = 0; t < k; ++t) {
      out.emplace_back(cand[t].second, cand[t].first);
    }
    if (cand[k - 1].first == 0.0) degenerate[i] = 1;
  });

  SimilarityGraph graph;
  graph.n_nodes = n;
  graph.adjacency.resize(n);

  // union symmetrization
  std::vector<std::map<int, double>> adj(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, d2] : nearest[i]) {
      const double w = std::exp(-gamma * d2);
      adj[i].emplace(j, w);
      adj[j].emplace(i, w);
    }
  }
  graph.degree.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    auto& nbrs = graph.adjacency[i];
    nbrs.assign(adj[i].begin(), adj[i].end());
    double deg = 0.0;
    for (const auto& [j, w] : nbrs) deg += w;
    graph.degree[i] = deg;
  }

  if (std::any_of(degenerate.begin(), degenerate.end(),
                  [](char c) { return c != 0; })) {
    graph.warnings.push_back(
        "duplicate points produced zero-distance neighbor lists; "
        "weight-1 edges kept");
  }
  return graph;
}

}  // namespace speclhs
