#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "speclhs/config.hpp"
#include "speclhs/errors.hpp"
#include "speclhs/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
  CLI::Option* out_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "run configuration JSON file")
      ->required();
  f.out_opt =
      cmd->add_option("--out", f.out, "output directory (overrides config)");
  f.seed_opt = cmd->add_option("--seed", f.seed, "RNG seed (overrides config)");
  f.threads_opt = cmd->add_option("--threads", f.threads,
                                  "worker threads, 0 = all cores");
}

speclhs::RunConfig effective_config(const CommonFlags& f) {
  speclhs::RunConfig config = speclhs::load_config(f.config_path);
  if (f.out_opt->count() > 0) config.output_dir = f.out;
  if (f.seed_opt->count() > 0) config.seed = f.seed;
  if (f.threads_opt->count() > 0) config.threads = f.threads;
  return config;
}

int parse_k_flag(const std::string& value, speclhs::RunConfig& config) {
  if (value == "auto") {
    config.k.reset();
    return 0;
  }
  try {
    const int k = std::stoi(value);
    if (k < 2) throw speclhs::InvalidConfig("--k must be >= 2 or \"auto\"");
    config.k = k;
  } catch (const std::logic_error&) {
    throw speclhs::InvalidConfig("--k must be an integer or \"auto\"");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "speclhs: spectral clustering zones + conditioned Latin hypercube "
      "sampling"};
  app.require_subcommand(1);

  CommonFlags cluster_flags;
  std::string k_flag;
  CLI::App* cmd_cluster = app.add_subcommand(
      "cluster", "partition the covariate space into K zones");
  add_common(cmd_cluster, cluster_flags);
  CLI::Option* k_opt = cmd_cluster->add_option(
      "--k", k_flag, "zone count, or \"auto\" to sweep k_range");

  CommonFlags selectk_flags;
  int k_min = 0;
  int k_max = 0;
  CLI::App* cmd_select_k = app.add_subcommand(
      "select-k", "score a range of K values and pick the best");
  add_common(cmd_select_k, selectk_flags);
  CLI::Option* kmin_opt =
      cmd_select_k->add_option("--k-min", k_min, "smallest K to score");
  CLI::Option* kmax_opt =
      cmd_select_k->add_option("--k-max", k_max, "largest K to score");

  CommonFlags sample_flags;
  std::string mode;
  int n_flag = 0;
  CLI::App* cmd_sample =
      app.add_subcommand("sample", "select sampling locations");
  add_common(cmd_sample, sample_flags);
  cmd_sample->add_option("--mode", mode, "spectral or vanilla")
      ->required()
      ->check(CLI::IsMember({"spectral", "vanilla"}));
  CLI::Option* n_opt =
      cmd_sample->add_option("--n", n_flag, "sample budget (overrides config)");

  CommonFlags report_flags;
  CLI::App* cmd_report = app.add_subcommand(
      "report", "compare the vanilla and spectral designs");
  add_common(cmd_report, report_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (cmd_cluster->parsed()) {
      speclhs::RunConfig config = effective_config(cluster_flags);
      if (k_opt->count() > 0) parse_k_flag(k_flag, config);
      const speclhs::ClusterOutputs out = speclhs::cmd_cluster(config);
      if (out.validity) {
        std::printf("best_k=%d\n", out.validity->best_k);
      }
      std::printf("wrote cluster model (K=%d) to %s\n", out.model.k,
                  config.output_dir.c_str());
    } else if (cmd_select_k->parsed()) {
      speclhs::RunConfig config = effective_config(selectk_flags);
      if (kmin_opt->count() > 0) config.k_min = k_min;
      if (kmax_opt->count() > 0) config.k_max = k_max;
      if (config.k_min < 2 || config.k_max < config.k_min) {
        throw speclhs::InvalidConfig("need 2 <= k-min <= k-max");
      }
      const speclhs::ValidityReport report = speclhs::cmd_select_k(config);
      std::printf("best_k=%d\n", report.best_k);
    } else if (cmd_sample->parsed()) {
      speclhs::RunConfig config = effective_config(sample_flags);
      if (n_opt->count() > 0) {
        if (n_flag < 1) throw speclhs::InvalidConfig("--n must be >= 1");
        config.n = n_flag;
      }
      const speclhs::SampleOutputs out = speclhs::cmd_sample(config, mode);
      std::printf("selected %zu cells (objective %.6g), outputs in %s\n",
                  out.selected.size(), out.objective,
                  config.output_dir.c_str());
    } else if (cmd_report->parsed()) {
      speclhs::RunConfig config = effective_config(report_flags);
      const speclhs::ComparisonTable table = speclhs::cmd_report(config);
      for (const auto& row : table.rows) {
        if (row.metric == "clusters_covered_fraction") {
          std::printf("clusters covered: %s %.3f, %s %.3f\n",
                      table.first_tag.c_str(), row.first,
                      table.second_tag.c_str(), row.second);
        }
      }
      std::printf("wrote comparison to %s\n", config.output_dir.c_str());
    }
  } catch (const speclhs::Error& e) {
    std::fprintf(stderr, "error[%s]: %s\n", e.tag().c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error[Internal]: %s\n", e.what());
    return 1;
  }
  return 0;
}
