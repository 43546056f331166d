#include "speclhs/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "speclhs/errors.hpp"
#include "speclhs/parallel.hpp"
#include "speclhs/rng.hpp"

namespace speclhs {

namespace {

// Nearest centroid, ties to the lower centroid index.
int nearest_centroid(const Eigen::MatrixXd& centroids,
                     const Eigen::RowVectorXd& p, double* dist_out) {
  int best = 0;
  double best_d = (centroids.row(0) - p).squaredNorm();
  for (int c = 1; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c) - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist_out) *dist_out = best_d;
  return best;
}

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const int n = static_cast<int>(points.rows());
  Eigen::MatrixXd centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<int>(rng.next_index(n)));

  std::vector<double> mindist(n, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = (points.row(i) - centroids.row(c - 1)).squaredNorm();
      if (d < mindist[i]) mindist[i] = d;
      total += mindist[i];
    }
    int pick;
    if (total > 0.0) {
      const double u = rng.next_double() * total;
      double cum = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        cum += mindist[i];
        if (u < cum) {
          pick = i;
          break;
        }
      }
    } else {
      // all points coincide with chosen centroids
      pick = static_cast<int>(rng.next_index(n));
    }
    centroids.row(c) = points.row(pick);
  }
  return centroids;
}

// Assigns every point to its nearest centroid, then re-seeds any empty
// cluster at the point farthest from its assigned centroid (ties to the
// lower point index). Centroid rows of re-seeded clusters are overwritten.
void assign_with_empty_fix(const Eigen::MatrixXd& points,
                           Eigen::MatrixXd& centroids,
                           std::vector<int>& labels,
                           std::vector<double>& dists,
                           std::vector<int>& counts) {
  const int n = static_cast<int>(points.rows());
  const int k = static_cast<int>(centroids.rows());
  std::fill(counts.begin(), counts.end(), 0);
  for (int i = 0; i < n; ++i) {
    labels[i] = nearest_centroid(centroids, points.row(i), &dists[i]);
    ++counts[labels[i]];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    int farthest = -1;
    double far_d = -1.0;
    for (int i = 0; i < n; ++i) {
      if (counts[labels[i]] <= 1) continue;  // keep donors non-empty
      if (dists[i] > far_d) {
        far_d = dists[i];
        farthest = i;
      }
    }
    if (farthest < 0) break;  // n < k cannot happen; all duplicates case
    --counts[labels[farthest]];
    labels[farthest] = c;
    counts[c] = 1;
    dists[farthest] = 0.0;
    centroids.row(c) = points.row(farthest);
  }
}

KMeansResult lloyd(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                   int max_iter, double tol) {
  const int n = static_cast<int>(points.rows());
  Rng rng(seed);
  Eigen::MatrixXd centroids = kmeanspp_init(points, k, rng);

  KMeansResult res;
  res.labels.assign(n, 0);
  std::vector<double> dists(n, 0.0);
  std::vector<int> counts(k, 0);

  for (int iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter + 1;
    assign_with_empty_fix(points, centroids, res.labels, dists, counts);

    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(k, points.cols());
    for (int i = 0; i < n; ++i) next.row(res.labels[i]) += points.row(i);
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) next.row(c) /= counts[c];
    }
    const double shift = (next - centroids).rowwise().norm().maxCoeff();
    centroids = next;
    if (shift < tol) break;
  }

  assign_with_empty_fix(points, centroids, res.labels, dists, counts);
  res.inertia = 0.0;
  for (int i = 0; i < n; ++i) res.inertia += dists[i];
  res.centroids = std::move(centroids);
  return res;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                    int n_init, int max_iter, double tol, int threads) {
  const int n = static_cast<int>(points.rows());
  if (k < 1) throw InvalidArgument("kmeans: K must be >= 1");
  if (n < k) {
    throw InvalidArgument("kmeans: " + std::to_string(n) + " rows for K=" +
                          std::to_string(k));
  }
  if (n_init < 1) n_init = 1;

  std::vector<KMeansResult> runs(n_init);
  parallel_for(static_cast<std::size_t>(n_init), threads, [&](std::size_t r) {
    runs[r] = lloyd(points, k, derive_seed(seed, r), max_iter, tol);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].inertia < runs[best].inertia) best = r;
  }
  return std::move(runs[best]);
}

}  // namespace speclhs
