#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "speclhs/clhs.hpp"
#include "speclhs/cluster.hpp"
#include "speclhs/feature_matrix.hpp"

namespace speclhs {

// Proportional sample allocation across clusters: largest-remainder
// apportionment with a floor of one per non-empty cluster, capped at
// cluster size. Award ties go to the lower cluster id.
std::vector<int> allocate(const std::vector<int>& cluster_sizes, int n);

// Pins chosen clusters to explicit counts (negative entries mean "not
// overridden") and re-apportions the remaining budget over the free
// clusters with the same floor-of-one rule.
std::vector<int> override_allocation(const std::vector<int>& cluster_sizes,
                                     int n,
                                     const std::vector<int>& overrides);

struct StratifiedDesign {
  std::vector<int> allocation;
  std::vector<CLHSDesign> per_cluster;  // selected holds global row indices
  std::vector<int> selected;            // merged, ascending
  double objective = 0.0;               // sum over clusters
  std::uint64_t seed = 0;
};

StratifiedDesign spectral_clhs(
    const FeatureMatrix& features, const ClusterModel& model, int n,
    const AnnealingSchedule& schedule, const ObjectiveWeights& weights,
    std::uint64_t seed, int threads = 1,
    const std::optional<std::vector<int>>& allocation_override = std::nullopt);

nlohmann::json stratified_to_json(const StratifiedDesign& design);
StratifiedDesign stratified_from_json(const nlohmann::json& j);
void write_stratified_json(const std::string& path,
                           const StratifiedDesign& design);
StratifiedDesign read_stratified_json(const std::string& path);

}  // namespace speclhs
