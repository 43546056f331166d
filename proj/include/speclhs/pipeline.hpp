#pragma once

#include <optional>
#include <string>
#include <vector>

#include "speclhs/cluster.hpp"
#include "speclhs/config.hpp"
#include "speclhs/feature_matrix.hpp"
#include "speclhs/raster.hpp"
#include "speclhs/report.hpp"
#include "speclhs/validity.hpp"

namespace speclhs {

/// Loaded inputs for one run: the raster stack, the masked matrix in
/// original units, and the normalized matrix everything downstream uses.
struct FeatureBundle {
  CovariateStack stack;
  FeatureMatrix raw;
  FeatureMatrix features;
  NormalizationParams norm;
};

FeatureBundle load_features(const RunConfig& config);

struct ClusterOutputs {
  ClusterModel model;
  std::optional<ValidityReport> validity;  // present when k was "auto"
};

/// Writes config.json, cluster_model.json, clusters.tif, and (k = auto)
/// validity.json + validity.csv into the output directory.
ClusterOutputs cmd_cluster(const RunConfig& config);

/// Writes config.json, validity.json, validity.csv.
ValidityReport cmd_select_k(const RunConfig& config);

struct SampleOutputs {
  std::vector<int> selected;
  double objective = 0.0;
};

/// mode is "spectral" or "vanilla". Writes config.json plus
/// design_<mode>.{json,csv,geojson} and trace_<mode>.csv. Spectral mode
/// requires a prior cmd_cluster in the same output directory.
SampleOutputs cmd_sample(const RunConfig& config, const std::string& mode);

/// Compares the vanilla and spectral designs found in the output
/// directory. Writes coverage_{vanilla,spectral}.json, comparison.csv,
/// scatter_{vanilla,spectral}.svg, map_{vanilla,spectral}.svg.
ComparisonTable cmd_report(const RunConfig& config);

}  // namespace speclhs
