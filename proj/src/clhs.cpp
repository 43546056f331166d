#include "speclhs/clhs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "speclhs/errors.hpp"
#include "speclhs/parallel.hpp"
#include "speclhs/rng.hpp"

namespace speclhs {

AnnealingSchedule AnnealingSchedule::for_budget(int n) {
  AnnealingSchedule s;
  s.moves_per_temp = std::max(10, 10 * n);
  s.iterations = std::max(1, (30000 + s.moves_per_temp - 1) / s.moves_per_temp);
  return s;
}

Eigen::MatrixXd quantile_strata(const Eigen::MatrixXd& candidates, int n) {
  const int n_c = static_cast<int>(candidates.rows());
  const int d = static_cast<int>(candidates.cols());
  if (n < 1) throw InvalidArgument("quantile_strata: n must be >= 1");
  if (n_c < n) {
    throw BudgetExceedsCandidates("quantile_strata: n exceeds candidate count");
  }

  Eigen::MatrixXd edges(d, n + 1);
  std::vector<double> sorted(n_c);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < n_c; ++i) sorted[i] = candidates(i, j);
    std::sort(sorted.begin(), sorted.end());
    for (int q = 0; q <= n; ++q) {
      const double h = (static_cast<double>(q) / n) * (n_c - 1);
      const int lo = std::min(static_cast<int>(h), n_c - 1);
      const double frac = h - lo;
      double e = sorted[lo];
      if (frac > 0.0 && lo + 1 < n_c) {
        e += frac * (sorted[lo + 1] - sorted[lo]);
      }
      if (q > 0) e = std::max(e, edges(j, q - 1));
      edges(j, q) = e;
    }
  }
  return edges;
}

int stratum_of(const Eigen::MatrixXd& edges, int covariate, int n, double v) {
  // first edge >= v, then step down one stratum: a value on an internal
  // edge lands in the lower stratum, and stratum 0 is closed on both ends
  int lo = 0;
  int hi = n;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (edges(covariate, mid) < v) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return std::clamp(lo - 1, 0, n - 1);
}

CLHSProblem make_problem(const Eigen::MatrixXd& candidates, int n,
                         const ObjectiveWeights& weights,
                         std::optional<Eigen::MatrixXi> categorical) {
  const int n_c = static_cast<int>(candidates.rows());
  const int d = static_cast<int>(candidates.cols());
  if (n < 1) throw InvalidArgument("make_problem: n must be >= 1");
  if (n > n_c) {
    throw BudgetExceedsCandidates("budget " + std::to_string(n) + " exceeds " +
                                  std::to_string(n_c) + " candidates");
  }
  if (categorical && categorical->rows() != n_c) {
    throw InvalidArgument("categorical row count mismatch");
  }

  CLHSProblem p;
  p.candidates = candidates;
  p.categorical = std::move(categorical);
  p.n = n;
  p.weights = weights;
  p.quantile_edges = quantile_strata(candidates, n);
  p.active.resize(d);
  for (int j = 0; j < d; ++j) {
    p.active[j] =
        candidates.col(j).maxCoeff() > candidates.col(j).minCoeff();
  }

  p.target_correlation = Eigen::MatrixXd::Identity(d, d);
  const Eigen::RowVectorXd mean = candidates.colwise().mean();
  Eigen::VectorXd sd(d);
  for (int j = 0; j < d; ++j) {
    sd(j) = std::sqrt((candidates.col(j).array() - mean(j)).square().sum());
  }
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      if (!p.active[a] || !p.active[b]) continue;
      const double cov =
          ((candidates.col(a).array() - mean(a)) *
           (candidates.col(b).array() - mean(b)))
              .sum();
      const double r = cov / (sd(a) * sd(b));
      p.target_correlation(a, b) = r;
      p.target_correlation(b, a) = r;
    }
  }
  return p;
}

namespace {

double occupancy_term(const std::vector<int>& selected,
                      const CLHSProblem& p) {
  const int d = p.n_covariates();
  double o1 = 0.0;
  std::vector<int> counts(p.n);
  for (int j = 0; j < d; ++j) {
    if (!p.active[j]) continue;  // zero-width strata contribute nothing
    std::fill(counts.begin(), counts.end(), 0);
    for (int idx : selected) {
      ++counts[stratum_of(p.quantile_edges, j, p.n, p.candidates(idx, j))];
    }
    for (int c : counts) o1 += std::abs(c - 1);
  }
  return o1;
}

double categorical_term(const std::vector<int>& selected,
                        const CLHSProblem& p) {
  if (!p.categorical) return 0.0;
  const auto& cat = *p.categorical;
  const int n_c = p.n_candidates();
  const int n = static_cast<int>(selected.size());
  double o2 = 0.0;
  for (int c = 0; c < cat.cols(); ++c) {
    const int max_id = cat.col(c).maxCoeff();
    std::vector<int> pop(max_id + 1, 0), sel(max_id + 1, 0);
    for (int i = 0; i < n_c; ++i) ++pop[cat(i, c)];
    for (int idx : selected) ++sel[cat(idx, c)];
    for (int id = 0; id <= max_id; ++id) {
      o2 += std::abs(static_cast<double>(sel[id]) / n -
                     static_cast<double>(pop[id]) / n_c);
    }
  }
  return o2;
}

double correlation_term(const std::vector<int>& selected,
                        const CLHSProblem& p) {
  const int n = static_cast<int>(selected.size());
  if (n < 3) return 0.0;  // Pearson unstable/undefined
  const int d = p.n_covariates();

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (int idx : selected) mean += p.candidates.row(idx).transpose();
  mean /= n;
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(d);
  for (int idx : selected) {
    for (int j = 0; j < d; ++j) {
      const double c = p.candidates(idx, j) - mean(j);
      ss(j) += c * c;
    }
  }

  double o3 = 0.0;
  for (int a = 0; a < d; ++a) {
    if (!p.active[a] || ss(a) == 0.0) continue;
    for (int b = a + 1; b < d; ++b) {
      if (!p.active[b] || ss(b) == 0.0) continue;
      double cov = 0.0;
      for (int idx : selected) {
        cov += (p.candidates(idx, a) - mean(a)) *
               (p.candidates(idx, b) - mean(b));
      }
      const double r = cov / std::sqrt(ss(a) * ss(b));
      o3 += std::abs(r - p.target_correlation(a, b));
    }
  }
  return o3;
}

}  // namespace

double objective(const std::vector<int>& selected, const CLHSProblem& p) {
  return p.weights.w1 * occupancy_term(selected, p) +
         p.weights.w2 * categorical_term(selected, p) +
         p.weights.w3 * correlation_term(selected, p);
}

CLHSDesign anneal(const CLHSProblem& problem,
                  const AnnealingSchedule& schedule, std::uint64_t seed) {
  const int n_c = problem.n_candidates();
  const int n = problem.n;
  if (n > n_c) {
    throw BudgetExceedsCandidates("budget " + std::to_string(n) + " exceeds " +
                                  std::to_string(n_c) + " candidates");
  }
  if (!(schedule.t0 > 0.0) || schedule.iterations < 1 ||
      schedule.moves_per_temp < 1 || schedule.cooling <= 0.0 ||
      schedule.cooling >= 1.0) {
    throw InvalidArgument("invalid annealing schedule");
  }

  Rng rng(seed);
  CLHSDesign design;
  design.seed = seed;

  std::vector<int> current = rng.sample_without_replacement(n_c, n);
  double cur_obj = objective(current, problem);
  std::vector<int> best = current;
  double best_obj = cur_obj;
  design.trace.push_back({0, schedule.t0, cur_obj, best_obj});

  if (n == n_c) {  // the only possible design
    design.selected = std::move(best);
    design.objective = best_obj;
    return design;
  }

  std::vector<char> is_selected(n_c, 0);
  for (int idx : current) is_selected[idx] = 1;
  std::vector<int> unselected;
  unselected.reserve(n_c - n);
  for (int i = 0; i < n_c; ++i) {
    if (!is_selected[i]) unselected.push_back(i);
  }

  std::vector<int> active_covariates;
  for (int j = 0; j < problem.n_covariates(); ++j) {
    if (problem.active[j]) active_covariates.push_back(j);
  }

  long moves_done = 0;
  for (int epoch = 0; epoch < schedule.iterations; ++epoch) {
    const double temp = schedule.t0 * std::pow(schedule.cooling, epoch);
    for (int move = 0; move < schedule.moves_per_temp; ++move) {
      ++moves_done;

      // removal: worst-stratum sample with probability p_worst_swap,
      // uniform otherwise
      std::size_t remove_pos;
      if (!active_covariates.empty() &&
          rng.next_double() < schedule.p_worst_swap) {
        const int j = active_covariates[rng.next_index(active_covariates.size())];
        std::vector<int> counts(n, 0);
        std::vector<int> strata(n);
        for (int s = 0; s < n; ++s) {
          strata[s] =
              stratum_of(problem.quantile_edges, j, n,
                         problem.candidates(current[s], j));
          ++counts[strata[s]];
        }
        int worst = 0;
        for (int s = 1; s < n; ++s) {
          if (counts[s] > counts[worst]) worst = s;
        }
        std::vector<std::size_t> members;
        for (int s = 0; s < n; ++s) {
          if (strata[s] == worst) members.push_back(s);
        }
        remove_pos = members[rng.next_index(members.size())];
      } else {
        remove_pos = rng.next_index(current.size());
      }

      const std::size_t insert_pos = rng.next_index(unselected.size());
      const int removed = current[remove_pos];
      const int inserted = unselected[insert_pos];

      current[remove_pos] = inserted;
      const double new_obj = objective(current, problem);
      const double delta = new_obj - cur_obj;
      bool accept = delta <= 0.0;
      if (!accept) {
        accept = rng.next_double() < std::exp(-delta / temp);
      }
      if (accept) {
        cur_obj = new_obj;
        is_selected[removed] = 0;
        is_selected[inserted] = 1;
        unselected[insert_pos] = removed;
        if (cur_obj < best_obj) {
          best_obj = cur_obj;
          best = current;
        }
      } else {
        current[remove_pos] = removed;
      }
    }
    design.trace.push_back({moves_done, temp, cur_obj, best_obj});
  }

  std::sort(best.begin(), best.end());
  design.selected = std::move(best);
  // evaluated on the sorted order so the stored objective is exactly
  // reproducible from the selected indices
  design.objective = objective(design.selected, problem);
  return design;
}

CLHSDesign anneal_multistart(const CLHSProblem& problem,
                             const AnnealingSchedule& schedule,
                             std::uint64_t seed, int restarts, int threads) {
  if (restarts < 1) restarts = 1;
  if (problem.n > problem.n_candidates()) {
    throw BudgetExceedsCandidates("budget exceeds candidates");
  }
  std::vector<CLHSDesign> runs(restarts);
  parallel_for(static_cast<std::size_t>(restarts), threads,
               [&](std::size_t r) {
                 runs[r] = anneal(problem, schedule, derive_seed(seed, r));
               });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].objective < runs[best].objective) best = r;
  }
  return std::move(runs[best]);
}

CLHSDesign vanilla_clhs(const FeatureMatrix& features, int n,
                        const AnnealingSchedule& schedule,
                        const ObjectiveWeights& weights, std::uint64_t seed) {
  const CLHSProblem problem = make_problem(features.values, n, weights);
  return anneal(problem, schedule, seed);
}

nlohmann::json design_to_json(const CLHSDesign& design) {
  nlohmann::json j;
  j["selected"] = design.selected;
  j["objective"] = design.objective;
  j["seed"] = design.seed;
  return j;
}

CLHSDesign design_from_json(const nlohmann::json& j) {
  CLHSDesign d;
  d.selected = j.at("selected").get<std::vector<int>>();
  d.objective = j.at("objective").get<double>();
  d.seed = j.at("seed").get<std::uint64_t>();
  return d;
}

void write_design_json(const std::string& path, const CLHSDesign& design) {
  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << design_to_json(design).dump(2) << "\n";
}

CLHSDesign read_design_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingDesign("cannot open design " + path);
  nlohmann::json j;
  try {
    in >> j;
    return design_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw MissingDesign(path + " is not a valid design: " + e.what());
  }
}

void write_trace_csv(const std::string& path, const CLHSDesign& design) {
  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << "iteration,temperature,objective,best\n";
  char buf[128];
  for (const auto& t : design.trace) {
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g\n", t.iteration,
                  t.temperature, t.current, t.best);
    out << buf;
  }
}

}  // namespace speclhs
