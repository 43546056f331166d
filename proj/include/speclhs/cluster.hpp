#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "speclhs/feature_matrix.hpp"
#include "speclhs/graph.hpp"

namespace speclhs {

/// A K-way partition of the feature rows.
struct ClusterModel {
  int k = 0;
  std::vector<int> labels;      // length N, ids in [0, K)
  Eigen::MatrixXd centroids;    // K x K embedding-space centers
  std::uint64_t seed = 0;
  std::optional<std::vector<int>> subset_indices;
  std::vector<std::string> warnings;

  std::vector<int> cluster_sizes() const;
};

/// m distinct indices drawn uniformly from [0, n_total), ascending;
/// deterministic for a fixed seed.
std::vector<int> subsample(int n_total, int m, std::uint64_t seed);

/// Nearest-subset-cell label extension in the original feature space.
/// Subset rows keep their own labels.
std::vector<int> assign_remaining(const Eigen::MatrixXd& features,
                                  const std::vector<int>& subset,
                                  const std::vector<int>& subset_labels,
                                  int threads = 1);

/// Full spectral clustering pipeline: (subsample) -> kNN graph ->
/// normalized Laplacian -> K leading eigenvectors, row-normalized ->
/// k-means -> (assign_remaining). Every cluster id is non-empty over all
/// N rows.
ClusterModel cluster(const FeatureMatrix& features, int k,
                     const KernelConfig& config, std::uint64_t seed,
                     int threads = 1);

/// cluster() plus the spectral embedding it ran k-means on, for scoring
/// partitions in the space where the labels were produced.
struct ClusterRun {
  ClusterModel model;
  Eigen::MatrixXd embedding;          // rows = points that entered k-means
  std::vector<int> embedding_labels;  // k-means labels for those rows
};

ClusterRun cluster_run(const FeatureMatrix& features, int k,
                       const KernelConfig& config, std::uint64_t seed,
                       int threads = 1);

nlohmann::json cluster_model_to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(const nlohmann::json& j);
void write_cluster_model(const std::string& path, const ClusterModel& model);
ClusterModel read_cluster_model(const std::string& path);

/// Single-band float32 GeoTIFF of cluster ids; masked cells get nodata.
void write_cluster_raster(const std::string& path, const ClusterModel& model,
                          const FeatureMatrix& features);

}  // namespace speclhs
