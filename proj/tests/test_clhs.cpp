#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <doctest.h>

#include "speclhs/clhs.hpp"
#include "speclhs/errors.hpp"
#include "speclhs/rng.hpp"

#include "support.hpp"

using namespace speclhs;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "speclhs_clhs_tests";
  fs::create_directories(dir);
  return dir;
}

FeatureMatrix as_features(const Eigen::MatrixXd& points) {
  FeatureMatrix fm;
  fm.values = points;
  fm.grid_width = static_cast<int>(points.rows());
  fm.grid_height = 1;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    fm.cell_index.push_back({0, static_cast<int>(i)});
  }
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    fm.covariate_names.push_back("c" + std::to_string(j));
  }
  return fm;
}

Eigen::MatrixXd random_candidates(int n_c, int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(n_c, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m(i / d, i % d) = rng.next_normal();
  }
  return m;
}

}  // namespace

TEST_CASE("median split of {1,2,3,4}") {
  Eigen::MatrixXd col(4, 1);
  col << 1, 2, 3, 4;
  const auto edges = quantile_strata(col, 2);
  REQUIRE(edges.rows() == 1);
  REQUIRE(edges.cols() == 3);
  CHECK(edges(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(edges(0, 1) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(edges(0, 2) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("a single stratum spans min to max") {
  Eigen::MatrixXd col(5, 1);
  col << 3, -1, 4, 1, 5;
  const auto edges = quantile_strata(col, 1);
  REQUIRE(edges.cols() == 2);
  CHECK(edges(0, 0) == -1.0);
  CHECK(edges(0, 1) == 5.0);
}

TEST_CASE("equal-probability strata hold near-equal counts") {
  const auto col = random_candidates(23, 1, 3);
  const int n = 5;
  const auto edges = quantile_strata(col, n);

  // Edges bracket the data and never decrease.
  CHECK(edges(0, 0) <= col.col(0).minCoeff());
  CHECK(edges(0, n) >= col.col(0).maxCoeff());
  for (int j = 1; j <= n; ++j) CHECK(edges(0, j) >= edges(0, j - 1));

  std::vector<int> counts(n, 0);
  for (int i = 0; i < 23; ++i) {
    ++counts[stratum_of(edges, 0, n, col(i, 0))];
  }
  int total = 0;
  for (int c : counts) {
    CHECK(std::abs(c - 23.0 / n) <= 1.0);
    total += c;
  }
  CHECK(total == 23);
}

TEST_CASE("stratum membership follows the boundary rules") {
  Eigen::MatrixXd edges(1, 4);
  edges << 0.0, 1.0, 2.0, 3.0;
  const int n = 3;
  // First stratum is closed on both ends.
  CHECK(stratum_of(edges, 0, n, 0.0) == 0);
  CHECK(stratum_of(edges, 0, n, 0.5) == 0);
  CHECK(stratum_of(edges, 0, n, 1.0) == 0);  // internal edge -> lower side
  CHECK(stratum_of(edges, 0, n, 1.5) == 1);
  CHECK(stratum_of(edges, 0, n, 2.0) == 1);
  CHECK(stratum_of(edges, 0, n, 2.5) == 2);
  CHECK(stratum_of(edges, 0, n, 3.0) == 2);
  // Out-of-range values clamp to the end strata.
  CHECK(stratum_of(edges, 0, n, -7.0) == 0);
  CHECK(stratum_of(edges, 0, n, 9.0) == 2);
}

TEST_CASE("a perfect hypercube scores zero") {
  Eigen::MatrixXd col(4, 1);
  col << 1, 2, 3, 4;
  const auto problem = make_problem(col, 4);
  CHECK(objective({0, 1, 2, 3}, problem) == 0.0);
}

TEST_CASE("piling one stratum costs twice n minus one") {
  CLHSProblem problem;
  const int n = 5;
  problem.candidates = Eigen::MatrixXd(n, 1);
  for (int i = 0; i < n; ++i) problem.candidates(i, 0) = 0.1 * (i + 1);
  problem.n = n;
  problem.quantile_edges = Eigen::MatrixXd(1, n + 1);
  for (int j = 0; j <= n; ++j) problem.quantile_edges(0, j) = j;
  problem.target_correlation = Eigen::MatrixXd::Identity(1, 1);
  problem.active = {true};

  // Every candidate value sits inside [0, 1), the first stratum.
  CHECK(objective({0, 1, 2, 3, 4}, problem) ==
        doctest::Approx(2.0 * (n - 1)).epsilon(1e-15));
}

TEST_CASE("objective matches the oracle over every 3-subset of 8") {
  const auto candidates = random_candidates(8, 2, 11);
  const auto problem = make_problem(candidates, 3);
  testsupport::for_each_subset(8, 3, [&](const std::vector<int>& subset) {
    const double got = objective(subset, problem);
    const double want = testsupport::clhs_objective_oracle(candidates, 3,
                                                           subset);
    CHECK(std::abs(got - want) <= 1e-12);
    CHECK(got >= 0.0);
  });
}

TEST_CASE("constant columns drop out of the objective") {
  Eigen::MatrixXd candidates(6, 2);
  candidates << 1, 7, 2, 7, 3, 7, 4, 7, 5, 7, 6, 7;
  const auto problem = make_problem(candidates, 3);
  REQUIRE(problem.active.size() == 2);
  CHECK(problem.active[0]);
  CHECK(!problem.active[1]);

  // Identical to the one-column problem on covariate 0.
  const auto lone = make_problem(candidates.leftCols(1), 3);
  testsupport::for_each_subset(6, 3, [&](const std::vector<int>& subset) {
    CHECK(objective(subset, problem) == objective(subset, lone));
  });
}

TEST_CASE("categorical proportions enter the objective") {
  Eigen::MatrixXd candidates(8, 1);
  candidates << 1, 2, 3, 4, 5, 6, 7, 8;
  Eigen::MatrixXi classes(8, 1);
  // Population split 50/50 between class 0 and class 1.
  classes << 0, 0, 0, 0, 1, 1, 1, 1;
  const auto problem = make_problem(candidates, 4, {}, classes);

  // {0,1,4,5} keeps the 50/50 split: O2 = 0.
  CHECK(objective({0, 1, 4, 5}, problem) ==
        doctest::Approx(objective({0, 1, 4, 5},
                                  make_problem(candidates, 4)))
            .epsilon(1e-12));
  // All class 0: proportions (1.0, 0.0) vs (0.5, 0.5) -> O2 = 1.
  const double skewed = objective({0, 1, 2, 3}, problem);
  const double no_cat = objective({0, 1, 2, 3}, make_problem(candidates, 4));
  CHECK(skewed - no_cat == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weights scale their terms") {
  const auto candidates = random_candidates(10, 2, 13);
  ObjectiveWeights heavy;
  heavy.w1 = 2.0;
  heavy.w3 = 0.5;
  const auto base = make_problem(candidates, 4);
  const auto scaled = make_problem(candidates, 4, heavy);

  ObjectiveWeights only1{1.0, 0.0, 0.0};
  ObjectiveWeights only3{0.0, 0.0, 1.0};
  const auto p1 = make_problem(candidates, 4, only1);
  const auto p3 = make_problem(candidates, 4, only3);

  const std::vector<int> pick{0, 3, 5, 8};
  const double o1 = objective(pick, p1);
  const double o3 = objective(pick, p3);
  CHECK(objective(pick, base) == doctest::Approx(o1 + o3).epsilon(1e-12));
  CHECK(objective(pick, scaled) ==
        doctest::Approx(2.0 * o1 + 0.5 * o3).epsilon(1e-12));
}

TEST_CASE("a single swap moves occupancy by at most two per covariate") {
  const auto candidates = random_candidates(30, 3, 17);
  ObjectiveWeights only1{1.0, 0.0, 0.0};
  const auto problem = make_problem(candidates, 6, only1);
  Rng rng(18);
  auto selected = rng.sample_without_replacement(30, 6);
  double obj = objective(selected, problem);
  for (int step = 0; step < 50; ++step) {
    const std::size_t out_pos = rng.next_index(6);
    int incoming;
    do {
      incoming = static_cast<int>(rng.next_index(30));
    } while (std::find(selected.begin(), selected.end(), incoming) !=
             selected.end());
    selected[out_pos] = incoming;
    const double next = objective(selected, problem);
    CHECK(std::abs(next - obj) <= 2.0 * 3 + 1e-12);
    obj = next;
  }
}

TEST_CASE("full budget forces the identity design") {
  const auto candidates = random_candidates(7, 2, 19);
  const auto problem = make_problem(candidates, 7);
  AnnealingSchedule schedule;
  schedule.iterations = 5;
  schedule.moves_per_temp = 10;
  const auto design = anneal(problem, schedule, 2);
  REQUIRE(design.selected.size() == 7);
  for (int i = 0; i < 7; ++i) CHECK(design.selected[i] == i);
  CHECK(design.objective == doctest::Approx(objective(design.selected,
                                                      problem)));
}

TEST_CASE("annealing finds the exhaustive optimum on a small instance") {
  const auto candidates = random_candidates(8, 2, 23);
  const auto problem = make_problem(candidates, 3);

  double optimum = std::numeric_limits<double>::infinity();
  testsupport::for_each_subset(8, 3, [&](const std::vector<int>& subset) {
    optimum = std::min(optimum, objective(subset, problem));
  });

  AnnealingSchedule schedule;
  schedule.t0 = 0.5;
  schedule.cooling = 0.9;
  schedule.iterations = 60;
  schedule.moves_per_temp = 30;
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto design = anneal(problem, schedule, seed);
    CHECK(design.objective >= optimum - 1e-12);
    if (design.objective <= optimum + 1e-12) ++hits;
  }
  CHECK(hits >= 4);
}

TEST_CASE("the best-objective trace never increases") {
  const auto candidates = random_candidates(40, 3, 29);
  const auto problem = make_problem(candidates, 8);
  const auto schedule = AnnealingSchedule::for_budget(8);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto design = anneal(problem, schedule, seed);
    REQUIRE(!design.trace.empty());
    for (std::size_t i = 1; i < design.trace.size(); ++i) {
      CHECK(design.trace[i].best <= design.trace[i - 1].best);
      CHECK(design.trace[i].temperature <= design.trace[i - 1].temperature);
      CHECK(design.trace[i].best <= design.trace[i].current + 1e-15);
    }
    CHECK(design.trace.back().best == doctest::Approx(design.objective));
  }
}

TEST_CASE("annealing is a pure function of problem, schedule, and seed") {
  const auto candidates = random_candidates(25, 2, 31);
  const auto problem = make_problem(candidates, 5);
  const auto schedule = AnnealingSchedule::for_budget(5);
  const auto a = anneal(problem, schedule, 77);
  const auto b = anneal(problem, schedule, 77);
  CHECK(a.selected == b.selected);
  CHECK(a.objective == b.objective);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].current == b.trace[i].current);
    CHECK(a.trace[i].best == b.trace[i].best);
  }

  // A different seed starts from a different initial design.
  const auto c = anneal(problem, schedule, 78);
  CHECK(a.trace[0].current != c.trace[0].current);
}

TEST_CASE("selected indices are distinct, sorted, and in range") {
  const auto candidates = random_candidates(50, 4, 37);
  const auto problem = make_problem(candidates, 12);
  const auto design = anneal(problem, AnnealingSchedule::for_budget(12), 5);
  REQUIRE(design.selected.size() == 12);
  for (std::size_t i = 0; i < design.selected.size(); ++i) {
    CHECK(design.selected[i] >= 0);
    CHECK(design.selected[i] < 50);
    if (i > 0) CHECK(design.selected[i] > design.selected[i - 1]);
  }
  // The stored objective is reproducible from the selected rows alone.
  CHECK(design.objective == objective(design.selected, problem));
}

TEST_CASE("bad schedules and budgets are rejected") {
  const auto candidates = random_candidates(10, 2, 41);
  const auto problem = make_problem(candidates, 4);
  AnnealingSchedule schedule;

  schedule.t0 = 0.0;
  CHECK_THROWS_AS(anneal(problem, schedule, 1), InvalidArgument);
  schedule = {};
  schedule.cooling = 1.0;
  CHECK_THROWS_AS(anneal(problem, schedule, 1), InvalidArgument);
  schedule = {};
  schedule.iterations = 0;
  CHECK_THROWS_AS(anneal(problem, schedule, 1), InvalidArgument);

  CHECK_THROWS_AS(make_problem(candidates, 11), BudgetExceedsCandidates);
  CHECK_THROWS_AS(quantile_strata(candidates, 11), BudgetExceedsCandidates);
  CHECK_THROWS_AS(quantile_strata(candidates, 0), InvalidArgument);
}

TEST_CASE("multistart is deterministic for any thread count") {
  const auto candidates = random_candidates(30, 3, 43);
  const auto problem = make_problem(candidates, 6);
  AnnealingSchedule schedule;
  schedule.iterations = 20;
  schedule.moves_per_temp = 20;

  const auto serial = anneal_multistart(problem, schedule, 9, 4, 1);
  const auto parallel = anneal_multistart(problem, schedule, 9, 4, 4);
  CHECK(serial.selected == parallel.selected);
  CHECK(serial.objective == parallel.objective);

  // Never worse than its own first chain.
  const auto chain0 = anneal(problem, schedule, derive_seed(9, 0));
  CHECK(serial.objective <= chain0.objective + 1e-15);
}

TEST_CASE("whole-area sampling selects from every cell") {
  const auto fm = as_features(random_candidates(40, 3, 47));
  const auto schedule = AnnealingSchedule::for_budget(10);
  const auto design = vanilla_clhs(fm, 10, schedule, {}, 3);
  REQUIRE(design.selected.size() == 10);
  for (int idx : design.selected) {
    CHECK(idx >= 0);
    CHECK(idx < 40);
  }

  const auto everything = vanilla_clhs(fm, 40, schedule, {}, 3);
  REQUIRE(everything.selected.size() == 40);
  for (int i = 0; i < 40; ++i) CHECK(everything.selected[i] == i);
}

TEST_CASE("beats a uniform-random design of the same size") {
  const auto fm = as_features(random_candidates(60, 3, 53));
  const auto problem = make_problem(fm.values, 8);
  const auto schedule = AnnealingSchedule::for_budget(8);
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto design = vanilla_clhs(fm, 8, schedule, {}, seed);
    Rng rng(seed);
    const auto random_pick = rng.sample_without_replacement(60, 8);
    if (design.objective <= objective(random_pick, problem) + 1e-12) ++wins;
  }
  CHECK(wins >= 19);
}

TEST_CASE("designs round-trip through JSON") {
  const auto candidates = random_candidates(20, 2, 59);
  const auto problem = make_problem(candidates, 5);
  const auto design = anneal(problem, AnnealingSchedule::for_budget(5), 21);

  const auto path = (temp_dir() / "design.json").string();
  write_design_json(path, design);
  const auto back = read_design_json(path);
  CHECK(back.selected == design.selected);
  CHECK(back.objective == design.objective);
  CHECK(back.seed == design.seed);

  CHECK_THROWS_AS(read_design_json((temp_dir() / "absent.json").string()),
                  MissingDesign);
}

TEST_CASE("trace CSV has the documented shape") {
  const auto candidates = random_candidates(15, 2, 61);
  const auto problem = make_problem(candidates, 4);
  AnnealingSchedule schedule;
  schedule.iterations = 6;
  schedule.moves_per_temp = 10;
  const auto design = anneal(problem, schedule, 4);

  const auto path = (temp_dir() / "trace.csv").string();
  write_trace_csv(path, design);
  const auto text = testsupport::read_file(path);
  CHECK(text.rfind("iteration,temperature,objective,best\n", 0) == 0);
  const auto lines = 1 + design.trace.size();
  CHECK(std::count(text.begin(), text.end(), '\n') == lines);
}

TEST_CASE("budget-sized schedules land near thirty thousand proposals") {
  for (int n : {1, 5, 10, 50, 300}) {
    const auto schedule = AnnealingSchedule::for_budget(n);
    CHECK(schedule.moves_per_temp == std::max(10, 10 * n));
    const long total =
        static_cast<long>(schedule.iterations) * schedule.moves_per_temp;
    CHECK(total >= 30000);
    CHECK(total < 30000 + schedule.moves_per_temp);
    CHECK(schedule.t0 > 0.0);
    CHECK(schedule.cooling > 0.0);
    CHECK(schedule.cooling < 1.0);
  }
}
