#include "speclhs/cluster.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

#include "speclhs/errors.hpp"
#include "speclhs/kmeans.hpp"
#include "speclhs/parallel.hpp"
#include "speclhs/rng.hpp"
#include "speclhs/spectral.hpp"

namespace speclhs {

namespace {
// Fixed sub-seed streams for the stages of cluster(). Keeping them
// disjoint makes the stages independently reproducible.
constexpr std::uint64_t kStreamSubsample = 1;
constexpr std::uint64_t kStreamGamma = 2;
constexpr std::uint64_t kStreamKMeans = 3;
}  // namespace

std::vector<int> ClusterModel::cluster_sizes() const {
  std::vector<int> sizes(k, 0);
  for (int label : labels) ++sizes[label];
  return sizes;
}

std::vector<int> subsample(int n_total, int m, std::uint64_t seed) {
  if (m < 1 || m > n_total) {
    throw InvalidArgument("subsample: m must be in [1, N]");
  }
  Rng rng(seed);
  return rng.sample_without_replacement(n_total, m);
}

std::vector<int> assign_remaining(const Eigen::MatrixXd& features,
                                  const std::vector<int>& subset,
                                  const std::vector<int>& subset_labels,
                                  int threads) {
  const int n = static_cast<int>(features.rows());
  std::vector<int> labels(n, -1);
  for (std::size_t s = 0; s < subset.size(); ++s) {
    labels[subset[s]] = subset_labels[s];
  }
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    if (labels[i] >= 0) return;  // subset rows keep their own labels
    double best = std::numeric_limits<double>::infinity();
    int best_s = 0;
    for (std::size_t s = 0; s < subset.size(); ++s) {
      const double d =
          (features.row(static_cast<int>(i)) - features.row(subset[s]))
              .squaredNorm();
      if (d < best) {
        best = d;
        best_s = static_cast<int>(s);
      }
    }
    labels[i] = subset_labels[best_s];
  });
  return labels;
}

ClusterRun cluster_run(const FeatureMatrix& features, int k,
                       const KernelConfig& config, std::uint64_t seed,
                       int threads) {
  const int n = static_cast<int>(features.n());
  if (k < 2) throw InvalidArgument("cluster: K must be >= 2");
  if (n < k) {
    throw InvalidArgument("cluster: only " + std::to_string(n) +
                          " cells for K=" + std::to_string(k));
  }

  const int threshold = config.subset_size
                            ? *config.subset_size
                            : KernelConfig::kDefaultSubsetThreshold;
  const int m = config.subset_size ? *config.subset_size
                                   : KernelConfig::kDefaultSubsetSize;

  ClusterRun run;
  ClusterModel& model = run.model;
  model.k = k;
  model.seed = seed;

  Eigen::MatrixXd points;
  std::vector<int> subset;
  const bool use_subset = n > threshold && m < n;
  if (use_subset) {
    subset = subsample(n, m, derive_seed(seed, kStreamSubsample));
    points.resize(m, features.d());
    for (int i = 0; i < m; ++i) points.row(i) = features.values.row(subset[i]);
    model.subset_indices = subset;
  } else {
    points = features.values;
  }

  KernelConfig graph_config = config;
  if (!graph_config.gamma) {
    graph_config.gamma = median_heuristic_gamma(
        points, config.knn, derive_seed(seed, kStreamGamma));
  }
  SimilarityGraph graph =
      build_knn_graph(points, graph_config, derive_seed(seed, kStreamGamma),
                      threads);
  for (auto& w : graph.warnings) model.warnings.push_back(std::move(w));

  const Eigen::MatrixXd lap = normalized_laplacian(graph);
  SpectralEmbedding emb = embed(lap, k);
  if (!emb.zero_rows.empty()) {
    model.warnings.push_back(std::to_string(emb.zero_rows.size()) +
                             " embedding rows had zero norm and were left "
                             "unnormalized");
  }

  KMeansResult km =
      kmeans(emb.coords, k, derive_seed(seed, kStreamKMeans), 10, 300, 1e-6,
             threads);
  model.centroids = std::move(km.centroids);
  run.embedding = std::move(emb.coords);
  run.embedding_labels = km.labels;

  if (use_subset) {
    model.labels =
        assign_remaining(features.values, subset, km.labels, threads);
  } else {
    model.labels = std::move(km.labels);
  }
  return run;
}

ClusterModel cluster(const FeatureMatrix& features, int k,
                     const KernelConfig& config, std::uint64_t seed,
                     int threads) {
  return cluster_run(features, k, config, seed, threads).model;
}

nlohmann::json cluster_model_to_json(const ClusterModel& model) {
  nlohmann::json j;
  j["K"] = model.k;
  j["seed"] = model.seed;
  j["labels"] = model.labels;
  if (model.subset_indices) {
    j["subset_indices"] = *model.subset_indices;
  } else {
    j["subset_indices"] = nullptr;
  }
  return j;
}

ClusterModel cluster_model_from_json(const nlohmann::json& j) {
  ClusterModel model;
  model.k = j.at("K").get<int>();
  model.seed = j.at("seed").get<std::uint64_t>();
  model.labels = j.at("labels").get<std::vector<int>>();
  if (j.contains("subset_indices") && !j.at("subset_indices").is_null()) {
    model.subset_indices = j.at("subset_indices").get<std::vector<int>>();
  }
  return model;
}

void write_cluster_model(const std::string& path, const ClusterModel& model) {
  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << cluster_model_to_json(model).dump(2) << "\n";
}

ClusterModel read_cluster_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingClusterModel("cannot open cluster model " + path);
  nlohmann::json j;
  try {
    in >> j;
    return cluster_model_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw MissingClusterModel(path + " is not a valid cluster model: " +
                              e.what());
  }
}

void write_cluster_raster(const std::string& path, const ClusterModel& model,
                          const FeatureMatrix& features) {
  constexpr double kNodata = -1.0;
  CovariateStack stack;
  stack.width = features.grid_width;
  stack.height = features.grid_height;
  stack.geo_transform = features.geo_transform;
  Band band;
  band.name = "cluster";
  band.nodata = kNodata;
  band.values.assign(static_cast<std::size_t>(stack.width) * stack.height,
                     kNodata);
  for (std::size_t i = 0; i < model.labels.size(); ++i) {
    const auto [r, c] = features.cell_index[i];
    band.values[static_cast<std::size_t>(r) * stack.width + c] =
        model.labels[i];
  }
  stack.bands.push_back(std::move(band));
  write_geotiff(path, stack);
}

}  // namespace speclhs
