#include "speclhs/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "speclhs/clhs.hpp"
#include "speclhs/errors.hpp"
#include "speclhs/parallel.hpp"
#include "speclhs/stratified.hpp"

namespace speclhs {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void report_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) {
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  }
}

/// Cluster ids for the design CSV / GeoJSON. Spectral mode requires a
/// matching model; vanilla mode uses one when present (so the comparison
/// is readable) and -1 otherwise.
std::vector<int> lookup_labels(const RunConfig& config,
                               const FeatureBundle& bundle, bool required) {
  const std::string path = join(config.output_dir, "cluster_model.json");
  if (!fs::exists(path)) {
    if (required) {
      throw MissingClusterModel("run the cluster command first: no " + path);
    }
    return std::vector<int>(bundle.features.n(), -1);
  }
  const ClusterModel model = read_cluster_model(path);
  if (static_cast<int>(model.labels.size()) != bundle.features.n()) {
    throw MismatchedContext(
        "cluster model in " + path + " covers " +
        std::to_string(model.labels.size()) + " cells but the current " +
        "inputs produce " + std::to_string(bundle.features.n()));
  }
  return model.labels;
}

void write_design_csv(const std::string& path, const FeatureBundle& bundle,
                      const std::vector<int>& selected,
                      const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << "cell,row,col,x,y,cluster";
  for (const auto& name : bundle.raw.covariate_names) {
    out << "," << csv_field(name);
  }
  out << "\r\n";
  for (int idx : selected) {
    const auto [row, col] = bundle.raw.cell_index[idx];
    const auto [x, y] = bundle.raw.cell_center(idx);
    out << idx << "," << row << "," << col << "," << g17(x) << "," << g17(y)
        << "," << labels[idx];
    for (int j = 0; j < bundle.raw.d(); ++j) {
      out << "," << g17(bundle.raw.values(idx, j));
    }
    out << "\r\n";
  }
}

void write_design_geojson(const std::string& path,
                          const FeatureBundle& bundle,
                          const std::vector<int>& selected,
                          const std::vector<int>& labels) {
  nlohmann::json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = nlohmann::json::array();
  for (int idx : selected) {
    const auto [row, col] = bundle.raw.cell_index[idx];
    const auto [x, y] = bundle.raw.cell_center(idx);
    nlohmann::json props{{"cell", idx},
                         {"row", row},
                         {"col", col},
                         {"cluster", labels[idx]}};
    for (int j = 0; j < bundle.raw.d(); ++j) {
      props[bundle.raw.covariate_names[j]] = bundle.raw.values(idx, j);
    }
    fc["features"].push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "Point"}, {"coordinates", {x, y}}}},
         {"properties", props}});
  }
  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << fc.dump(2) << "\n";
}

void write_spectral_trace_csv(const std::string& path,
                              const StratifiedDesign& design) {
  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << "cluster,iteration,temperature,objective,best\n";
  for (std::size_t c = 0; c < design.per_cluster.size(); ++c) {
    for (const auto& t : design.per_cluster[c].trace) {
      out << c << "," << t.iteration << "," << g17(t.temperature) << ","
          << g17(t.current) << "," << g17(t.best) << "\n";
    }
  }
}

}  // namespace

FeatureBundle load_features(const RunConfig& config) {
  FeatureBundle bundle;
  if (config.input_format == "csv") {
    bundle.stack = read_csv_stack(config.input_paths.front());
    if (!config.band_names.empty()) {
      if (config.band_names.size() != bundle.stack.bands.size()) {
        throw InvalidConfig("band_names count does not match csv columns");
      }
      for (std::size_t i = 0; i < config.band_names.size(); ++i) {
        bundle.stack.bands[i].name = config.band_names[i];
      }
    }
  } else {
    bundle.stack = load_stack(config.input_paths, config.band_names);
  }
  bundle.raw = build_feature_matrix(bundle.stack, config.mask);
  auto [features, norm] = normalize(bundle.raw, config.normalization);
  bundle.features = std::move(features);
  bundle.norm = std::move(norm);
  for (const auto& name : bundle.norm.dropped) {
    std::fprintf(stderr, "warning: dropped constant covariate %s\n",
                 name.c_str());
  }
  return bundle;
}

ClusterOutputs cmd_cluster(const RunConfig& config) {
  const FeatureBundle bundle = load_features(config);
  write_effective_config(config);
  const int threads = resolve_threads(config.threads);

  ClusterOutputs out;
  int k;
  if (config.k) {
    k = *config.k;
  } else {
    out.validity = select_k(bundle.features, config.k_min, config.k_max,
                            config.kernel, config.seed,
                            {.raw_space = false, .threads = threads});
    write_validity_json(join(config.output_dir, "validity.json"),
                        *out.validity);
    write_validity_csv(join(config.output_dir, "validity.csv"),
                       *out.validity);
    k = out.validity->best_k;
  }

  out.model = cluster(bundle.features, k, config.kernel, config.seed, threads);
  report_warnings(out.model.warnings);
  write_cluster_model(join(config.output_dir, "cluster_model.json"),
                      out.model);
  write_cluster_raster(join(config.output_dir, "clusters.tif"), out.model,
                       bundle.features);
  return out;
}

ValidityReport cmd_select_k(const RunConfig& config) {
  const FeatureBundle bundle = load_features(config);
  write_effective_config(config);
  const int threads = resolve_threads(config.threads);
  const ValidityReport report =
      select_k(bundle.features, config.k_min, config.k_max, config.kernel,
               config.seed, {.raw_space = false, .threads = threads});
  write_validity_json(join(config.output_dir, "validity.json"), report);
  write_validity_csv(join(config.output_dir, "validity.csv"), report);
  return report;
}

SampleOutputs cmd_sample(const RunConfig& config, const std::string& mode) {
  if (mode != "spectral" && mode != "vanilla") {
    throw InvalidArgument("mode must be \"spectral\" or \"vanilla\"");
  }
  const FeatureBundle bundle = load_features(config);
  write_effective_config(config);
  const AnnealingSchedule schedule = effective_schedule(config);
  const int threads = resolve_threads(config.threads);

  SampleOutputs out;
  std::vector<int> labels;
  if (mode == "spectral") {
    labels = lookup_labels(config, bundle, true);
    ClusterModel model = read_cluster_model(
        join(config.output_dir, "cluster_model.json"));
    const StratifiedDesign design =
        spectral_clhs(bundle.features, model, config.n, schedule,
                      config.weights, config.seed, threads);
    write_stratified_json(join(config.output_dir, "design_spectral.json"),
                          design);
    write_spectral_trace_csv(join(config.output_dir, "trace_spectral.csv"),
                             design);
    out.selected = design.selected;
    out.objective = design.objective;
  } else {
    labels = lookup_labels(config, bundle, false);
    const CLHSDesign design = vanilla_clhs(bundle.features, config.n,
                                           schedule, config.weights,
                                           config.seed);
    write_design_json(join(config.output_dir, "design_vanilla.json"), design);
    write_trace_csv(join(config.output_dir, "trace_vanilla.csv"), design);
    out.selected = design.selected;
    out.objective = design.objective;
  }

  write_design_csv(join(config.output_dir, "design_" + mode + ".csv"),
                   bundle, out.selected, labels);
  write_design_geojson(join(config.output_dir, "design_" + mode + ".geojson"),
                       bundle, out.selected, labels);
  return out;
}

ComparisonTable cmd_report(const RunConfig& config) {
  const FeatureBundle bundle = load_features(config);
  write_effective_config(config);

  const std::string model_path =
      join(config.output_dir, "cluster_model.json");
  if (!fs::exists(model_path)) {
    throw MissingClusterModel("run the cluster command first: no " +
                              model_path);
  }
  const ClusterModel model = read_cluster_model(model_path);
  if (static_cast<int>(model.labels.size()) != bundle.features.n()) {
    throw MismatchedContext("cluster model does not match the current inputs");
  }

  const CLHSDesign vanilla =
      read_design_json(join(config.output_dir, "design_vanilla.json"));
  const StratifiedDesign spectral =
      read_stratified_json(join(config.output_dir, "design_spectral.json"));

  const CoverageSummary vs =
      summarize(vanilla.selected, model, bundle.features, "vanilla");
  const CoverageSummary ss =
      summarize(spectral.selected, model, bundle.features, "spectral");
  const ComparisonTable table = compare(vs, ss);

  write_summary_json(join(config.output_dir, "coverage_vanilla.json"), vs);
  write_summary_json(join(config.output_dir, "coverage_spectral.json"), ss);
  write_comparison_csv(join(config.output_dir, "comparison.csv"), table);

  const int d = std::min<int>(2, static_cast<int>(bundle.features.d()));
  const PCAProjection proj = pca(bundle.features.values, d);
  emit_scatter(proj, model.labels, vanilla.selected,
               join(config.output_dir, "scatter_vanilla.svg"));
  emit_scatter(proj, model.labels, spectral.selected,
               join(config.output_dir, "scatter_spectral.svg"));
  emit_cluster_map(model, bundle.features, vanilla.selected,
                   join(config.output_dir, "map_vanilla.svg"));
  emit_cluster_map(model, bundle.features, spectral.selected,
                   join(config.output_dir, "map_spectral.svg"));
  return table;
}

}  // namespace speclhs
