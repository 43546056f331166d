#include "speclhs/feature_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "speclhs/errors.hpp"

namespace speclhs {

namespace {

int band_index(const CovariateStack& stack, const std::string& name) {
  for (std::size_t i = 0; i < stack.bands.size(); ++i) {
    if (stack.bands[i].name == name) return static_cast<int>(i);
  }
  throw InvalidArgument("mask rule references unknown band '" + name + "'");
}

bool cell_passes(const CovariateStack& stack,
                 const std::vector<std::pair<int, MaskRule>>& resolved,
                 std::size_t cell) {
  for (const auto& band : stack.bands) {
    if (!std::isfinite(band.values[cell])) return false;
  }
  for (const auto& [idx, rule] : resolved) {
    const double v = stack.bands[idx].values[cell];
    switch (rule.kind) {
      case MaskKind::Nodata:
        if (stack.bands[idx].nodata && v == *stack.bands[idx].nodata) {
          return false;
        }
        break;
      case MaskKind::Range:
        if (v < rule.lo || v > rule.hi) return false;
        break;
    }
  }
  return true;
}

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

FeatureMatrix build_feature_matrix(const CovariateStack& stack,
                                   const std::vector<MaskRule>& rules) {
  if (stack.bands.empty()) {
    throw InvalidArgument("build_feature_matrix: stack has no bands");
  }
  std::vector<std::pair<int, MaskRule>> resolved;
  resolved.reserve(rules.size());
  for (const auto& rule : rules) {
    resolved.emplace_back(band_index(stack, rule.band), rule);
  }

  std::vector<std::size_t> kept;
  const std::size_t ncells =
      static_cast<std::size_t>(stack.width) * stack.height;
  for (std::size_t cell = 0; cell < ncells; ++cell) {
    if (cell_passes(stack, resolved, cell)) kept.push_back(cell);
  }
  if (kept.empty()) {
    throw EmptyAfterMask("no cells survive the mask rules");
  }

  FeatureMatrix fm;
  fm.grid_width = stack.width;
  fm.grid_height = stack.height;
  fm.geo_transform = stack.geo_transform;
  fm.values.resize(static_cast<Eigen::Index>(kept.size()),
                   static_cast<Eigen::Index>(stack.bands.size()));
  fm.cell_index.reserve(kept.size());
  for (const auto& band : stack.bands) fm.covariate_names.push_back(band.name);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const std::size_t cell = kept[i];
    fm.cell_index.emplace_back(static_cast<int>(cell / stack.width),
                               static_cast<int>(cell % stack.width));
    for (std::size_t b = 0; b < stack.bands.size(); ++b) {
      fm.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) =
          stack.bands[b].values[cell];
    }
  }
  return fm;
}

std::pair<FeatureMatrix, NormalizationParams> normalize(
    const FeatureMatrix& features, NormMethod method) {
  const Eigen::Index n = features.n();
  const Eigen::Index d = features.d();
  if (n < 2) throw InvalidArgument("normalize requires at least 2 rows");

  NormalizationParams params;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto col = features.values.col(j);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (lo == hi) {
      params.dropped.push_back(features.covariate_names[j]);
      continue;
    }
    NormalizationParams::Column pc;
    pc.name = features.covariate_names[j];
    pc.method = method;
    if (method == NormMethod::ZScore) {
      const double mean = col.mean();
      const double sd =
          std::sqrt((col.array() - mean).square().sum() / double(n - 1));
      pc.center = mean;
      pc.scale = sd;
    } else {
      pc.center = lo;
      pc.scale = hi - lo;
    }
    params.columns.push_back(pc);
    keep.push_back(j);
  }
  if (keep.empty()) {
    throw AllColumnsDegenerate("every covariate is constant");
  }

  FeatureMatrix out;
  out.cell_index = features.cell_index;
  out.grid_width = features.grid_width;
  out.grid_height = features.grid_height;
  out.geo_transform = features.geo_transform;
  out.values.resize(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t jj = 0; jj < keep.size(); ++jj) {
    const auto& pc = params.columns[jj];
    out.covariate_names.push_back(pc.name);
    out.values.col(static_cast<Eigen::Index>(jj)) =
        (features.values.col(keep[jj]).array() - pc.center) / pc.scale;
  }
  return {std::move(out), std::move(params)};
}

FeatureMatrix denormalize(const FeatureMatrix& features,
                          const NormalizationParams& params) {
  if (static_cast<std::size_t>(features.d()) != params.columns.size()) {
    throw InvalidArgument("denormalize: column count mismatch");
  }
  FeatureMatrix out = features;
  for (Eigen::Index j = 0; j < features.d(); ++j) {
    const auto& pc = params.columns[j];
    out.values.col(j) =
        features.values.col(j).array() * pc.scale + pc.center;
  }
  return out;
}

void write_feature_csv(const std::string& path,
                       const FeatureMatrix& features) {
  std::ofstream out(path);
  if (!out) throw FileWriteError("cannot create " + path);
  out << "x,y";
  for (const auto& name : features.covariate_names) out << "," << name;
  out << "\n";
  for (Eigen::Index i = 0; i < features.n(); ++i) {
    const auto [x, y] = features.cell_center(static_cast<int>(i));
    out << format_g17(x) << "," << format_g17(y);
    for (Eigen::Index j = 0; j < features.d(); ++j) {
      out << "," << format_g17(features.values(i, j));
    }
    out << "\n";
  }
  if (!out) throw FileWriteError("write failed for " + path);
}

}  // namespace speclhs
