#include "speclhs/config.hpp"

#include <filesystem>
#include <fstream>

#include "speclhs/errors.hpp"

namespace speclhs {

namespace {

bool ends_with_ci(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    const char a = std::tolower(s[s.size() - suffix.size() + i]);
    if (a != suffix[i]) return false;
  }
  return true;
}

const nlohmann::json* find(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

double require_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw InvalidConfig(where + " must be a number");
  return j.get<double>();
}

int require_int(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number_integer()) {
    throw InvalidConfig(where + " must be an integer");
  }
  return j.get<int>();
}

MaskRule parse_mask_rule(const nlohmann::json& j, int position) {
  const std::string where = "mask[" + std::to_string(position) + "]";
  if (!j.is_object()) throw InvalidConfig(where + " must be an object");
  MaskRule rule;
  const auto* band = find(j, "band");
  if (!band || !band->is_string()) {
    throw InvalidConfig(where + ".band is required");
  }
  rule.band = band->get<std::string>();
  std::string kind = "nodata";
  if (const auto* k = find(j, "kind")) kind = k->get<std::string>();
  if (kind == "nodata") {
    rule.kind = MaskKind::Nodata;
  } else if (kind == "range") {
    rule.kind = MaskKind::Range;
    const auto* lo = find(j, "lo");
    const auto* hi = find(j, "hi");
    if (!lo || !hi) {
      throw InvalidConfig(where + ": range rule needs lo and hi");
    }
    rule.lo = require_number(*lo, where + ".lo");
    rule.hi = require_number(*hi, where + ".hi");
    if (rule.lo > rule.hi) {
      throw InvalidConfig(where + ": lo exceeds hi");
    }
  } else {
    throw InvalidConfig(where + ".kind must be \"nodata\" or \"range\"");
  }
  return rule;
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidConfig("config root must be an object");
  RunConfig c;

  const auto* input = find(j, "input");
  if (!input || !input->is_object()) {
    throw InvalidConfig("input section is required");
  }
  const auto* paths = find(*input, "paths");
  if (!paths || !paths->is_array() || paths->empty()) {
    throw InvalidConfig("input.paths must be a non-empty array");
  }
  for (const auto& p : *paths) {
    if (!p.is_string()) throw InvalidConfig("input.paths entries must be strings");
    c.input_paths.push_back(p.get<std::string>());
  }
  if (const auto* names = find(*input, "band_names")) {
    for (const auto& b : *names) c.band_names.push_back(b.get<std::string>());
  }
  if (const auto* fmt = find(*input, "format")) {
    c.input_format = fmt->get<std::string>();
  } else {
    c.input_format =
        ends_with_ci(c.input_paths.front(), ".csv") ? "csv" : "geotiff";
  }
  if (c.input_format != "csv" && c.input_format != "geotiff") {
    throw InvalidConfig("input.format must be \"csv\" or \"geotiff\"");
  }
  if (c.input_format == "csv" && c.input_paths.size() != 1) {
    throw InvalidConfig("csv input takes exactly one path");
  }

  if (const auto* mask = find(j, "mask")) {
    if (!mask->is_array()) throw InvalidConfig("mask must be an array");
    for (std::size_t i = 0; i < mask->size(); ++i) {
      c.mask.push_back(parse_mask_rule((*mask)[i], static_cast<int>(i)));
    }
  }

  if (const auto* norm = find(j, "normalization")) {
    const std::string m = norm->get<std::string>();
    if (m == "zscore") {
      c.normalization = NormMethod::ZScore;
    } else if (m == "minmax") {
      c.normalization = NormMethod::MinMax;
    } else {
      throw InvalidConfig("normalization must be \"zscore\" or \"minmax\"");
    }
  }

  if (const auto* kernel = find(j, "kernel")) {
    if (!kernel->is_object()) throw InvalidConfig("kernel must be an object");
    if (const auto* gamma = find(*kernel, "gamma")) {
      if (gamma->is_string()) {
        if (gamma->get<std::string>() != "auto") {
          throw InvalidConfig("kernel.gamma must be a number or \"auto\"");
        }
      } else {
        const double g = require_number(*gamma, "kernel.gamma");
        if (!(g > 0.0)) throw InvalidConfig("kernel.gamma must be positive");
        c.kernel.gamma = g;
      }
    }
    if (const auto* knn = find(*kernel, "knn")) {
      c.kernel.knn = require_int(*knn, "kernel.knn");
      if (c.kernel.knn < 1) throw InvalidConfig("kernel.knn must be >= 1");
    }
    if (const auto* sub = find(*kernel, "subset_size")) {
      const int m = require_int(*sub, "kernel.subset_size");
      if (m < 2) throw InvalidConfig("kernel.subset_size must be >= 2");
      c.kernel.subset_size = m;
    }
  }

  if (const auto* k = find(j, "k")) {
    if (k->is_string()) {
      if (k->get<std::string>() != "auto") {
        throw InvalidConfig("k must be an integer or \"auto\"");
      }
    } else {
      const int kk = require_int(*k, "k");
      if (kk < 2) throw InvalidConfig("k must be >= 2");
      c.k = kk;
    }
  }
  if (const auto* kr = find(j, "k_range")) {
    if (!kr->is_array() || kr->size() != 2) {
      throw InvalidConfig("k_range must be [k_min, k_max]");
    }
    c.k_min = require_int((*kr)[0], "k_range[0]");
    c.k_max = require_int((*kr)[1], "k_range[1]");
  }
  if (c.k_min < 2 || c.k_max < c.k_min) {
    throw InvalidConfig("k_range must satisfy 2 <= k_min <= k_max");
  }

  if (const auto* n = find(j, "n")) {
    c.n = require_int(*n, "n");
  }
  if (c.n < 1) throw InvalidConfig("n must be >= 1");

  if (const auto* w = find(j, "weights")) {
    if (!w->is_object()) throw InvalidConfig("weights must be an object");
    if (const auto* v = find(*w, "w1")) c.weights.w1 = require_number(*v, "weights.w1");
    if (const auto* v = find(*w, "w2")) c.weights.w2 = require_number(*v, "weights.w2");
    if (const auto* v = find(*w, "w3")) c.weights.w3 = require_number(*v, "weights.w3");
    if (c.weights.w1 < 0 || c.weights.w2 < 0 || c.weights.w3 < 0) {
      throw InvalidConfig("weights must be non-negative");
    }
  }

  if (const auto* s = find(j, "schedule")) {
    if (s->is_string()) {
      if (s->get<std::string>() != "auto") {
        throw InvalidConfig("schedule must be an object or \"auto\"");
      }
    } else if (s->is_object()) {
      AnnealingSchedule sched;
      if (const auto* v = find(*s, "t0")) sched.t0 = require_number(*v, "schedule.t0");
      if (const auto* v = find(*s, "cooling")) {
        sched.cooling = require_number(*v, "schedule.cooling");
      }
      if (const auto* v = find(*s, "iterations")) {
        sched.iterations = require_int(*v, "schedule.iterations");
      }
      if (const auto* v = find(*s, "moves_per_temp")) {
        sched.moves_per_temp = require_int(*v, "schedule.moves_per_temp");
      }
      if (const auto* v = find(*s, "p_worst_swap")) {
        sched.p_worst_swap = require_number(*v, "schedule.p_worst_swap");
      }
      if (!(sched.t0 > 0.0) || sched.cooling <= 0.0 || sched.cooling >= 1.0 ||
          sched.iterations < 1 || sched.moves_per_temp < 1 ||
          sched.p_worst_swap < 0.0 || sched.p_worst_swap > 1.0) {
        throw InvalidConfig("schedule fields out of range");
      }
      c.schedule = sched;
    } else {
      throw InvalidConfig("schedule must be an object or \"auto\"");
    }
  }

  const auto* seed = find(j, "seed");
  if (!seed || !seed->is_number_integer()) {
    throw InvalidConfig("seed is required and must be an integer");
  }
  c.seed = seed->get<std::uint64_t>();

  if (const auto* out = find(j, "output_dir")) {
    c.output_dir = out->get<std::string>();
  }
  if (c.output_dir.empty()) throw InvalidConfig("output_dir must be non-empty");

  if (const auto* t = find(j, "threads")) {
    c.threads = require_int(*t, "threads");
    if (c.threads < 0) throw InvalidConfig("threads must be >= 0");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UnreadableFile("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(path + ": " + e.what());
  }
  return config_from_json(j);
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["input"] = {{"format", c.input_format}, {"paths", c.input_paths}};
  if (!c.band_names.empty()) j["input"]["band_names"] = c.band_names;
  j["mask"] = nlohmann::json::array();
  for (const auto& rule : c.mask) {
    nlohmann::json r{{"band", rule.band}};
    if (rule.kind == MaskKind::Nodata) {
      r["kind"] = "nodata";
    } else {
      r["kind"] = "range";
      r["lo"] = rule.lo;
      r["hi"] = rule.hi;
    }
    j["mask"].push_back(r);
  }
  j["normalization"] =
      c.normalization == NormMethod::ZScore ? "zscore" : "minmax";
  j["kernel"] = nlohmann::json::object();
  if (c.kernel.gamma) {
    j["kernel"]["gamma"] = *c.kernel.gamma;
  } else {
    j["kernel"]["gamma"] = "auto";
  }
  j["kernel"]["knn"] = c.kernel.knn;
  if (c.kernel.subset_size) {
    j["kernel"]["subset_size"] = *c.kernel.subset_size;
  } else {
    j["kernel"]["subset_size"] = nullptr;
  }
  if (c.k) {
    j["k"] = *c.k;
  } else {
    j["k"] = "auto";
  }
  j["k_range"] = {c.k_min, c.k_max};
  j["n"] = c.n;
  j["weights"] = {{"w1", c.weights.w1}, {"w2", c.weights.w2}, {"w3", c.weights.w3}};
  if (c.schedule) {
    j["schedule"] = {{"t0", c.schedule->t0},
                     {"cooling", c.schedule->cooling},
                     {"iterations", c.schedule->iterations},
                     {"moves_per_temp", c.schedule->moves_per_temp},
                     {"p_worst_swap", c.schedule->p_worst_swap}};
  } else {
    j["schedule"] = "auto";
  }
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  return j;
}

void write_effective_config(const RunConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  const std::string path =
      (std::filesystem::path(config.output_dir) / "config.json").string();
  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << config_to_json(config).dump(2) << "\n";
}

AnnealingSchedule effective_schedule(const RunConfig& config) {
  return config.schedule ? *config.schedule
                         : AnnealingSchedule::for_budget(config.n);
}

}  // namespace speclhs
