#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "speclhs/clhs.hpp"
#include "speclhs/feature_matrix.hpp"
#include "speclhs/graph.hpp"

namespace speclhs {

/// One declarative description of a run. The seed is mandatory: there is
/// no wall-clock fallback, so identical configs give identical outputs.
struct RunConfig {
  std::string input_format;  // "csv" or "geotiff"
  std::vector<std::string> input_paths;
  std::vector<std::string> band_names;
  std::vector<MaskRule> mask;
  NormMethod normalization = NormMethod::ZScore;
  KernelConfig kernel;
  std::optional<int> k;  // unset = pick via select_k over [k_min, k_max]
  int k_min = 2;
  int k_max = 15;
  int n = 10;
  ObjectiveWeights weights;
  std::optional<AnnealingSchedule> schedule;  // unset = sized from n
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  int threads = 0;  // 0 = hardware concurrency
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& config);

/// Writes the defaults-resolved config to <output_dir>/config.json so the
/// run can be reproduced from the output tree alone.
void write_effective_config(const RunConfig& config);

AnnealingSchedule effective_schedule(const RunConfig& config);

}  // namespace speclhs
