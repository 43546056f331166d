#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace speclhs {

/// RBF affinity configuration. gamma unset means "median heuristic".
/// subset_size caps the number of points entering the eigenproblem; when
/// unset, subsetting starts above kDefaultSubsetThreshold points with
/// kDefaultSubsetSize kept.
struct KernelConfig {
  std::optional<double> gamma;
  int knn = 10;
  std::optional<int> subset_size;

  static constexpr int kDefaultSubsetThreshold = 3000;
  static constexpr int kDefaultSubsetSize = 2000;
};

/// Sparse symmetric similarity graph. adjacency[i] holds (j, w_ij) pairs
/// sorted by j, no self-edges, w_ij in (0, 1].
struct SimilarityGraph {
  int n_nodes = 0;
  std::vector<std::vector<std::pair<int, double>>> adjacency;
  std::vector<double> degree;
  std::vector<std::string> warnings;

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& nbrs : adjacency) twice += nbrs.size();
    return twice / 2;
  }
};

/// exp(-gamma * ||x - y||^2), in (0, 1].
double rbf_weight(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                  double gamma);

/// Bandwidth from the median k-th neighbor distance over a probe sample of
/// at most 1000 points: gamma = 1 / (2 * median^2). Falls back to 1 when
/// the median distance is zero (duplicate-heavy data).
double median_heuristic_gamma(const Eigen::MatrixXd& points, int knn,
                              std::uint64_t seed);

/// kNN graph over rows of `points`, symmetrized by union, RBF weights.
/// Neighbor ties break on the lower index. Duplicate-point degeneracy is
/// recorded as a warning; the graph is still built (weight-1 edges).
SimilarityGraph build_knn_graph(const Eigen::MatrixXd& points,
                                const KernelConfig& config,
                                std::uint64_t seed, int threads = 1);

}  // namespace speclhs
