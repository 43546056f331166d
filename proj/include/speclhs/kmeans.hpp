#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace speclhs {

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;  // k x dims
  double inertia = 0.0;
  int iterations = 0;
};

/// Lloyd iterations with k-means++ seeding. Runs n_init independent
/// restarts (seeded from `seed` per restart index) and keeps the
/// lowest-inertia result, ties to the lower restart index — deterministic
/// for any thread count. Empty clusters are re-seeded at the point
/// farthest from its assigned centroid.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                    int n_init = 10, int max_iter = 300, double tol = 1e-6,
                    int threads = 1);

}  // namespace speclhs
