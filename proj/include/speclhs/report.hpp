#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "speclhs/cluster.hpp"
#include "speclhs/feature_matrix.hpp"

namespace speclhs {

struct PCAProjection {
  Eigen::MatrixXd components;  // D x d, orthonormal columns
  Eigen::MatrixXd scores;      // N x d
  std::vector<double> explained_variance_ratio;
  bool degenerate = false;  // covariance rank fell short of requested d
};

// Principal components of the column-centered matrix. Sign convention:
// the largest-magnitude loading of each component is positive. When the
// covariance rank is below d only the available components are returned
// and the projection is flagged degenerate.
PCAProjection pca(const Eigen::MatrixXd& values, int d = 2);

struct CoverageSummary {
  std::string design_tag;
  int k = 0;
  int n = 0;
  std::vector<int> per_cluster_counts;
  double clusters_covered_fraction = 0.0;
  std::vector<double> per_covariate_stratum_occupancy;
  std::vector<std::string> covariate_names;
};

CoverageSummary summarize(const std::vector<int>& selected,
                          const ClusterModel& model,
                          const FeatureMatrix& features,
                          const std::string& design_tag);

struct ComparisonRow {
  std::string metric;
  double first = 0.0;
  double second = 0.0;
  double delta = 0.0;  // second - first
};

struct ComparisonTable {
  std::string first_tag;
  std::string second_tag;
  std::vector<ComparisonRow> rows;
};

ComparisonTable compare(const CoverageSummary& first,
                        const CoverageSummary& second);

nlohmann::json summary_to_json(const CoverageSummary& summary);
void write_summary_json(const std::string& path,
                        const CoverageSummary& summary);
nlohmann::json comparison_to_json(const ComparisonTable& table);
void write_comparison_csv(const std::string& path,
                          const ComparisonTable& table);

// Fixed categorical palette; cycles for cluster ids beyond ten.
const std::string& cluster_color(int cluster_id);

void emit_scatter(const PCAProjection& projection,
                  const std::vector<int>& labels,
                  const std::vector<int>& selected, const std::string& path);

void emit_cluster_map(const ClusterModel& model, const FeatureMatrix& features,
                      const std::vector<int>& selected,
                      const std::string& path);

}  // namespace speclhs
