#include <optional>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "speclhs/clhs.hpp"
#include "speclhs/cluster.hpp"
#include "speclhs/errors.hpp"
#include "speclhs/report.hpp"
#include "speclhs/stratified.hpp"
#include "speclhs/validity.hpp"

namespace py = pybind11;
using namespace speclhs;

namespace {

FeatureMatrix matrix_features(const Eigen::MatrixXd& values) {
  FeatureMatrix f;
  f.values = values;
  f.grid_width = static_cast<int>(values.rows());
  f.grid_height = 1;
  f.cell_index.reserve(values.rows());
  for (int i = 0; i < values.rows(); ++i) f.cell_index.emplace_back(0, i);
  f.covariate_names.reserve(values.cols());
  for (int j = 0; j < values.cols(); ++j) {
    f.covariate_names.push_back("c" + std::to_string(j));
  }
  return f;
}

KernelConfig kernel_config(int knn, std::optional<double> gamma,
                           std::optional<int> subset_size) {
  KernelConfig config;
  config.knn = knn;
  config.gamma = gamma;
  config.subset_size = subset_size;
  return config;
}

AnnealingSchedule schedule_for(int n, double t0, double cooling,
                               std::optional<int> iterations,
                               std::optional<int> moves_per_temp,
                               double p_worst_swap) {
  AnnealingSchedule s = AnnealingSchedule::for_budget(n);
  s.t0 = t0;
  s.cooling = cooling;
  s.p_worst_swap = p_worst_swap;
  if (iterations) s.iterations = *iterations;
  if (moves_per_temp) s.moves_per_temp = *moves_per_temp;
  return s;
}

ClusterModel model_from_labels(const Eigen::MatrixXd& values,
                               const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != values.rows()) {
    throw MismatchedContext("labels length must equal the number of rows");
  }
  ClusterModel model;
  model.labels = labels;
  for (int l : labels) {
    if (l < 0) throw InvalidArgument("labels must be non-negative");
    model.k = std::max(model.k, l + 1);
  }
  return model;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Spectral clustering zones and conditioned Latin hypercube sampling";

  py::register_exception<Error>(m, "SpeclhsError", PyExc_RuntimeError);

  py::class_<ClusterModel>(m, "ClusterModel")
      .def_readonly("k", &ClusterModel::k)
      .def_readonly("labels", &ClusterModel::labels)
      .def_readonly("seed", &ClusterModel::seed)
      .def_readonly("subset_indices", &ClusterModel::subset_indices)
      .def_readonly("warnings", &ClusterModel::warnings)
      .def("cluster_sizes", &ClusterModel::cluster_sizes);

  py::class_<ValidityReport>(m, "ValidityReport")
      .def_readonly("k_values", &ValidityReport::k_values)
      .def_readonly("silhouette", &ValidityReport::silhouette)
      .def_readonly("calinski_harabasz", &ValidityReport::calinski_harabasz)
      .def_readonly("composite", &ValidityReport::composite)
      .def_readonly("best_k", &ValidityReport::best_k);

  py::class_<TraceEntry>(m, "TraceEntry")
      .def_readonly("iteration", &TraceEntry::iteration)
      .def_readonly("temperature", &TraceEntry::temperature)
      .def_readonly("current", &TraceEntry::current)
      .def_readonly("best", &TraceEntry::best);

  py::class_<CLHSDesign>(m, "CLHSDesign")
      .def_readonly("selected", &CLHSDesign::selected)
      .def_readonly("objective", &CLHSDesign::objective)
      .def_readonly("trace", &CLHSDesign::trace)
      .def_readonly("seed", &CLHSDesign::seed);

  py::class_<StratifiedDesign>(m, "StratifiedDesign")
      .def_readonly("allocation", &StratifiedDesign::allocation)
      .def_readonly("per_cluster", &StratifiedDesign::per_cluster)
      .def_readonly("selected", &StratifiedDesign::selected)
      .def_readonly("objective", &StratifiedDesign::objective)
      .def_readonly("seed", &StratifiedDesign::seed);

  py::class_<PCAProjection>(m, "PCAProjection")
      .def_readonly("components", &PCAProjection::components)
      .def_readonly("scores", &PCAProjection::scores)
      .def_readonly("explained_variance_ratio",
                    &PCAProjection::explained_variance_ratio)
      .def_readonly("degenerate", &PCAProjection::degenerate);

  m.def(
      "cluster",
      [](const Eigen::MatrixXd& values, int k, int knn,
         std::optional<double> gamma, std::optional<int> subset_size,
         std::uint64_t seed, int threads) {
        return cluster(matrix_features(values), k,
                       kernel_config(knn, gamma, subset_size), seed, threads);
      },
      py::arg("values"), py::arg("k"), py::kw_only(), py::arg("knn") = 10,
      py::arg("gamma") = std::nullopt, py::arg("subset_size") = std::nullopt,
      py::arg("seed") = 0, py::arg("threads") = 1,
      "Spectral clustering of the rows of `values` into k zones.");

  m.def(
      "select_k",
      [](const Eigen::MatrixXd& values, int k_min, int k_max, int knn,
         std::optional<double> gamma, std::optional<int> subset_size,
         std::uint64_t seed, int threads) {
        return select_k(matrix_features(values), k_min, k_max,
                        kernel_config(knn, gamma, subset_size), seed,
                        {.raw_space = false, .threads = threads});
      },
      py::arg("values"), py::arg("k_min"), py::arg("k_max"), py::kw_only(),
      py::arg("knn") = 10, py::arg("gamma") = std::nullopt,
      py::arg("subset_size") = std::nullopt, py::arg("seed") = 0,
      py::arg("threads") = 1,
      "Score each K in [k_min, k_max] and pick the best composite.");

  m.def(
      "silhouette_score",
      [](const Eigen::MatrixXd& points, const std::vector<int>& labels) {
        return silhouette_score(points, labels);
      },
      py::arg("points"), py::arg("labels"));

  m.def(
      "calinski_harabasz_score",
      [](const Eigen::MatrixXd& points, const std::vector<int>& labels) {
        return calinski_harabasz_score(points, labels);
      },
      py::arg("points"), py::arg("labels"));

  m.def(
      "quantile_strata",
      [](const Eigen::MatrixXd& values, int n) {
        return quantile_strata(values, n);
      },
      py::arg("values"), py::arg("n"),
      "Per-covariate equal-probability stratum edges, one row per column "
      "of `values`, n+1 edges each.");

  m.def(
      "clhs_objective",
      [](const Eigen::MatrixXd& values, int n,
         const std::vector<int>& selected) {
        return objective(selected, make_problem(values, n));
      },
      py::arg("values"), py::arg("n"), py::arg("selected"));

  m.def(
      "clhs",
      [](const Eigen::MatrixXd& values, int n, std::uint64_t seed, double t0,
         double cooling, std::optional<int> iterations,
         std::optional<int> moves_per_temp, double p_worst_swap) {
        return anneal(make_problem(values, n),
                      schedule_for(n, t0, cooling, iterations, moves_per_temp,
                                   p_worst_swap),
                      seed);
      },
      py::arg("values"), py::arg("n"), py::kw_only(), py::arg("seed") = 0,
      py::arg("t0") = 1.0, py::arg("cooling") = 0.95,
      py::arg("iterations") = std::nullopt,
      py::arg("moves_per_temp") = std::nullopt,
      py::arg("p_worst_swap") = 0.2,
      "Conditioned Latin hypercube sample of n rows via simulated "
      "annealing.");

  m.def(
      "allocate",
      [](const std::vector<int>& sizes, int n) { return allocate(sizes, n); },
      py::arg("cluster_sizes"), py::arg("n"),
      "Largest-remainder allocation with a floor of one per non-empty "
      "cluster.");

  m.def(
      "spectral_clhs",
      [](const Eigen::MatrixXd& values, const std::vector<int>& labels, int n,
         std::uint64_t seed, double t0, double cooling,
         std::optional<int> iterations, std::optional<int> moves_per_temp,
         double p_worst_swap, int threads,
         std::optional<std::vector<int>> allocation) {
        const ClusterModel model = model_from_labels(values, labels);
        return spectral_clhs(matrix_features(values), model, n,
                             schedule_for(n, t0, cooling, iterations,
                                          moves_per_temp, p_worst_swap),
                             {}, seed, threads, allocation);
      },
      py::arg("values"), py::arg("labels"), py::arg("n"), py::kw_only(),
      py::arg("seed") = 0, py::arg("t0") = 1.0, py::arg("cooling") = 0.95,
      py::arg("iterations") = std::nullopt,
      py::arg("moves_per_temp") = std::nullopt, py::arg("p_worst_swap") = 0.2,
      py::arg("threads") = 1, py::arg("allocation") = std::nullopt,
      "Per-cluster conditioned Latin hypercube sampling: allocate n across "
      "the labeled clusters, run one anneal per cluster, merge.");

  m.def(
      "pca", [](const Eigen::MatrixXd& values, int d) { return pca(values, d); },
      py::arg("values"), py::arg("d") = 2,
      "Principal components of the column-centered matrix.");
}
