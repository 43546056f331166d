#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "speclhs/feature_matrix.hpp"
#include "speclhs/graph.hpp"

namespace speclhs {

/// Per-K validity scores over a sweep. Failed Ks carry NaN scores and are
/// excluded from best_k.
struct ValidityReport {
  std::vector<int> k_values;
  std::vector<double> silhouette;
  std::vector<double> calinski_harabasz;
  std::vector<double> composite;
  int best_k = 0;
};

/// Mean silhouette: s(i) = (b - a) / max(a, b), singleton clusters
/// contribute 0, 0/0 defined as 0. Throws SingleCluster when fewer than
/// two clusters are present.
double silhouette_score(const Eigen::MatrixXd& points,
                        const std::vector<int>& labels);

/// (B / (K-1)) / (W / (n-K)). Returns +infinity when the within-cluster
/// scatter W is exactly zero.
double calinski_harabasz_score(const Eigen::MatrixXd& points,
                               const std::vector<int>& labels);

/// Min-max normalizes each metric across the sweep to [0, 1] (a constant
/// metric maps to all 0.5, +infinity entries to 1) and averages the two
/// with equal weight.
std::vector<double> composite_score(const std::vector<double>& silhouette,
                                    const std::vector<double>& ch);

struct SelectKOptions {
  bool raw_space = false;  // score in feature space instead of embedding
  int threads = 1;
};

/// Clusters once per K (independent derived seed per K), scores each
/// partition, and picks best_k = argmax composite, ties to the smallest K.
ValidityReport select_k(const FeatureMatrix& features, int k_min, int k_max,
                        const KernelConfig& config, std::uint64_t seed,
                        const SelectKOptions& options = {});

nlohmann::json validity_report_to_json(const ValidityReport& report);
void write_validity_json(const std::string& path, const ValidityReport& r);
void write_validity_csv(const std::string& path, const ValidityReport& r);

}  // namespace speclhs
