#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "speclhs/feature_matrix.hpp"

namespace speclhs {

struct ObjectiveWeights {
  double w1 = 1.0;  // stratum occupancy
  double w2 = 1.0;  // categorical proportions
  double w3 = 1.0;  // correlation preservation
};

/// A conditioned-Latin-hypercube instance over a fixed candidate set.
/// quantile_edges has one row per covariate with n+1 non-decreasing edges;
/// `active` is false for constant columns, which contribute nothing to the
/// occupancy or correlation terms.
struct CLHSProblem {
  Eigen::MatrixXd candidates;                  // n_c x D
  std::optional<Eigen::MatrixXi> categorical;  // n_c x C class ids
  int n = 0;
  Eigen::MatrixXd quantile_edges;  // D x (n+1)
  ObjectiveWeights weights;
  Eigen::MatrixXd target_correlation;  // D x D, unit diagonal
  std::vector<bool> active;

  int n_candidates() const { return static_cast<int>(candidates.rows()); }
  int n_covariates() const { return static_cast<int>(candidates.cols()); }
};

struct AnnealingSchedule {
  double t0 = 1.0;
  double cooling = 0.95;
  int iterations = 100;      // temperature epochs
  int moves_per_temp = 100;  // proposals per epoch
  double p_worst_swap = 0.2;

  /// Defaults sized so total proposals land near 30,000.
  static AnnealingSchedule for_budget(int n);
};

struct TraceEntry {
  long iteration;
  double temperature;
  double current;
  double best;
};

struct CLHSDesign {
  std::vector<int> selected;  // ascending distinct candidate indices
  double objective = 0.0;
  std::vector<TraceEntry> trace;
  std::uint64_t seed = 0;
};

/// n+1 equal-probability quantile edges per covariate column, linear
/// interpolation on sorted order statistics.
Eigen::MatrixXd quantile_strata(const Eigen::MatrixXd& candidates, int n);

/// Stratum index of v given one covariate's edges (n+1 values). A value on
/// an internal edge belongs to the lower stratum; the first stratum is
/// closed on both ends.
int stratum_of(const Eigen::MatrixXd& edges, int covariate, int n, double v);

/// Assembles a problem: strata from quantile_strata, target correlation
/// from the full candidate set.
CLHSProblem make_problem(const Eigen::MatrixXd& candidates, int n,
                         const ObjectiveWeights& weights = {},
                         std::optional<Eigen::MatrixXi> categorical = {});

/// w1*O1 + w2*O2 + w3*O3: stratum occupancy deviation, categorical
/// proportion deviation, correlation deviation.
double objective(const std::vector<int>& selected, const CLHSProblem& problem);

/// Simulated annealing over n-subsets with Metropolis acceptance and
/// geometric cooling; returns the best design visited. Deterministic for a
/// fixed seed.
CLHSDesign anneal(const CLHSProblem& problem, const AnnealingSchedule& schedule,
                  std::uint64_t seed);

/// R independent chains with derived seeds; best objective wins, ties to
/// the lowest chain index.
CLHSDesign anneal_multistart(const CLHSProblem& problem,
                             const AnnealingSchedule& schedule,
                             std::uint64_t seed, int restarts,
                             int threads = 1);

/// Single global cLHS over all feature rows (the baseline design).
CLHSDesign vanilla_clhs(const FeatureMatrix& features, int n,
                        const AnnealingSchedule& schedule,
                        const ObjectiveWeights& weights, std::uint64_t seed);

nlohmann::json design_to_json(const CLHSDesign& design);
CLHSDesign design_from_json(const nlohmann::json& j);
void write_design_json(const std::string& path, const CLHSDesign& design);
CLHSDesign read_design_json(const std::string& path);
void write_trace_csv(const std::string& path, const CLHSDesign& design);

}  // namespace speclhs
