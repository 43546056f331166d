#include "speclhs/stratified.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <nlohmann/json.hpp>

#include "speclhs/errors.hpp"
#include "speclhs/parallel.hpp"
#include "speclhs/rng.hpp"

namespace speclhs {

std::vector<int> allocate(const std::vector<int>& cluster_sizes, int n) {
  const int k = static_cast<int>(cluster_sizes.size());
  if (k == 0) throw InvalidArgument("allocate: no clusters");
  long total = 0;
  int non_empty = 0;
  for (int s : cluster_sizes) {
    if (s < 0) throw InvalidArgument("allocate: negative cluster size");
    total += s;
    if (s > 0) ++non_empty;
  }
  if (n > total) {
    throw InfeasibleBudget("budget " + std::to_string(n) + " exceeds " +
                           std::to_string(total) + " candidates");
  }
  if (n < non_empty) {
    throw BudgetTooSmall("budget " + std::to_string(n) +
                         " cannot cover one sample in each of " +
                         std::to_string(non_empty) + " non-empty clusters");
  }

  std::vector<double> quota(k, 0.0);
  std::vector<double> remainder(k, 0.0);
  std::vector<int> out(k, 0);
  for (int i = 0; i < k; ++i) {
    if (cluster_sizes[i] == 0) continue;
    quota[i] = static_cast<double>(n) * cluster_sizes[i] / total;
    remainder[i] = quota[i] - std::floor(quota[i]);
    out[i] = std::clamp(static_cast<int>(std::floor(quota[i])), 1,
                        cluster_sizes[i]);
  }

  int diff = n - std::accumulate(out.begin(), out.end(), 0);
  while (diff > 0) {
    int pick = -1;
    for (int i = 0; i < k; ++i) {
      if (out[i] >= cluster_sizes[i]) continue;
      if (pick < 0 || remainder[i] > remainder[pick]) pick = i;
    }
    ++out[pick];
    remainder[pick] -= 1.0;  // spent; next pass prefers others
    --diff;
  }
  while (diff < 0) {
    int pick = -1;
    for (int i = 0; i < k; ++i) {
      if (out[i] <= 1) continue;
      if (pick < 0 || remainder[i] <= remainder[pick]) pick = i;
    }
    --out[pick];
    remainder[pick] += 1.0;
    ++diff;
  }
  return out;
}

std::vector<int> override_allocation(const std::vector<int>& cluster_sizes,
                                     int n,
                                     const std::vector<int>& overrides) {
  if (overrides.size() != cluster_sizes.size()) {
    throw OverrideInfeasible("override has " +
                             std::to_string(overrides.size()) +
                             " entries for " +
                             std::to_string(cluster_sizes.size()) +
                             " clusters");
  }
  long fixed = 0;
  std::vector<std::size_t> free_ids;
  for (std::size_t i = 0; i < overrides.size(); ++i) {
    if (overrides[i] < 0) {
      free_ids.push_back(i);
      continue;
    }
    if (overrides[i] < 1) {
      throw OverrideInfeasible("cluster " + std::to_string(i) +
                               ": override below the one-sample floor");
    }
    if (overrides[i] > cluster_sizes[i]) {
      throw OverrideInfeasible(
          "cluster " + std::to_string(i) + ": override " +
          std::to_string(overrides[i]) + " exceeds cluster size " +
          std::to_string(cluster_sizes[i]));
    }
    fixed += overrides[i];
  }
  const long remaining = n - fixed;
  if (free_ids.empty()) {
    if (remaining != 0) {
      throw OverrideInfeasible("overrides total " + std::to_string(fixed) +
                               " but the budget is " + std::to_string(n));
    }
    return overrides;
  }
  if (remaining < static_cast<long>(free_ids.size())) {
    throw OverrideInfeasible(
        "remaining budget " + std::to_string(remaining) +
        " cannot give each of the " + std::to_string(free_ids.size()) +
        " free clusters one sample");
  }
  long free_capacity = 0;
  std::vector<int> free_sizes;
  free_sizes.reserve(free_ids.size());
  for (std::size_t id : free_ids) {
    free_sizes.push_back(cluster_sizes[id]);
    free_capacity += cluster_sizes[id];
  }
  if (remaining > free_capacity) {
    throw OverrideInfeasible("remaining budget " + std::to_string(remaining) +
                             " exceeds the free clusters' " +
                             std::to_string(free_capacity) + " cells");
  }

  const auto sub = allocate(free_sizes, static_cast<int>(remaining));
  std::vector<int> counts = overrides;
  for (std::size_t j = 0; j < free_ids.size(); ++j) {
    counts[free_ids[j]] = sub[j];
  }
  return counts;
}

StratifiedDesign spectral_clhs(
    const FeatureMatrix& features, const ClusterModel& model, int n,
    const AnnealingSchedule& schedule, const ObjectiveWeights& weights,
    std::uint64_t seed, int threads,
    const std::optional<std::vector<int>>& allocation_override) {
  if (static_cast<int>(model.labels.size()) != features.n()) {
    throw MismatchedContext("cluster model labels cover " +
                            std::to_string(model.labels.size()) +
                            " cells but feature matrix has " +
                            std::to_string(features.n()));
  }

  const std::vector<int> sizes = model.cluster_sizes();
  StratifiedDesign design;
  design.seed = seed;
  design.allocation = allocation_override
                          ? override_allocation(sizes, n, *allocation_override)
                          : allocate(sizes, n);

  std::vector<std::vector<int>> members(model.k);
  for (int i = 0; i < features.n(); ++i) {
    members[model.labels[i]].push_back(i);
  }

  design.per_cluster.resize(model.k);
  std::vector<CLHSProblem> problems(model.k);
  for (int c = 0; c < model.k; ++c) {
    if (design.allocation[c] == 0) continue;
    Eigen::MatrixXd rows(members[c].size(), features.d());
    for (std::size_t r = 0; r < members[c].size(); ++r) {
      rows.row(r) = features.values.row(members[c][r]);
    }
    problems[c] = make_problem(rows, design.allocation[c], weights);
  }

  parallel_for(static_cast<std::size_t>(model.k), threads, [&](std::size_t c) {
    if (design.allocation[c] == 0) return;
    CLHSDesign d = anneal(problems[c], schedule, derive_seed(seed, c));
    for (int& idx : d.selected) idx = members[c][idx];
    std::sort(d.selected.begin(), d.selected.end());
    design.per_cluster[c] = std::move(d);
  });

  for (const auto& d : design.per_cluster) {
    design.objective += d.objective;
    design.selected.insert(design.selected.end(), d.selected.begin(),
                           d.selected.end());
  }
  std::sort(design.selected.begin(), design.selected.end());
  return design;
}

nlohmann::json stratified_to_json(const StratifiedDesign& design) {
  nlohmann::json j;
  j["allocation"] = design.allocation;
  j["selected"] = design.selected;
  j["objective"] = design.objective;
  j["seed"] = design.seed;
  j["per_cluster"] = nlohmann::json::array();
  for (const auto& d : design.per_cluster) {
    j["per_cluster"].push_back({{"selected", d.selected},
                                {"objective", d.objective},
                                {"seed", d.seed}});
  }
  return j;
}

StratifiedDesign stratified_from_json(const nlohmann::json& j) {
  StratifiedDesign d;
  d.allocation = j.at("allocation").get<std::vector<int>>();
  d.selected = j.at("selected").get<std::vector<int>>();
  d.objective = j.at("objective").get<double>();
  d.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& pc : j.at("per_cluster")) {
    CLHSDesign c;
    c.selected = pc.at("selected").get<std::vector<int>>();
    c.objective = pc.at("objective").get<double>();
    c.seed = pc.at("seed").get<std::uint64_t>();
    d.per_cluster.push_back(std::move(c));
  }
  return d;
}

void write_stratified_json(const std::string& path,
                           const StratifiedDesign& design) {
  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << stratified_to_json(design).dump(2) << "\n";
}

StratifiedDesign read_stratified_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingDesign("cannot open design " + path);
  nlohmann::json j;
  try {
    in >> j;
    return stratified_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw MissingDesign(path + " is not a valid design: " + e.what());
  }
}

}  // namespace speclhs
