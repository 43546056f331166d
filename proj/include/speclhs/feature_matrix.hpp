#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "speclhs/raster.hpp"

namespace speclhs {

enum class MaskKind {
  Nodata,  // cell masked where band value equals the band's nodata flag
  Range,   // cell masked where band value falls outside [lo, hi]
};

struct MaskRule {
  std::string band;
  MaskKind kind = MaskKind::Nodata;
  double lo = 0.0;
  double hi = 0.0;
};

/// The universe both clustering and sampling operate on: one row per valid
/// grid cell, one column per covariate. Carries the grid geometry so
/// designs can be mapped back to cells and map coordinates.
struct FeatureMatrix {
  Eigen::MatrixXd values;  // N x D
  std::vector<std::pair<int, int>> cell_index;  // row -> (grid row, grid col)
  std::vector<std::string> covariate_names;
  int grid_width = 0;
  int grid_height = 0;
  std::array<double, 6> geo_transform{0.0, 1.0, 0.0, 0.0, 0.0, -1.0};

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index d() const { return values.cols(); }

  std::pair<double, double> cell_center(int feature_row) const {
    const auto [r, c] = cell_index[feature_row];
    const double cc = c + 0.5;
    const double rr = r + 0.5;
    return {geo_transform[0] + cc * geo_transform[1] + rr * geo_transform[2],
            geo_transform[3] + cc * geo_transform[4] + rr * geo_transform[5]};
  }
};

/// Flattens the stack to valid cells in row-major scan order. A cell is
/// retained iff every band value is finite and it passes every mask rule.
/// Throws EmptyAfterMask when nothing survives.
FeatureMatrix build_feature_matrix(const CovariateStack& stack,
                                   const std::vector<MaskRule>& rules = {});

enum class NormMethod { ZScore, MinMax };

struct NormalizationParams {
  struct Column {
    std::string name;
    NormMethod method;
    double center;
    double scale;
  };
  std::vector<Column> columns;         // retained covariates, in order
  std::vector<std::string> dropped;    // zero-variance covariates
};

/// zscore: columns to mean 0, sample sd 1. minmax: columns to [0, 1].
/// Zero-variance columns are dropped and reported in params.dropped.
/// Throws AllColumnsDegenerate when every column is constant.
std::pair<FeatureMatrix, NormalizationParams> normalize(
    const FeatureMatrix& features, NormMethod method);

/// Inverse of normalize for the retained columns.
FeatureMatrix denormalize(const FeatureMatrix& features,
                          const NormalizationParams& params);

/// Writes the matrix in the same delimited-text format read_csv_stack
/// accepts: header row, X/Y columns, one line per cell.
void write_feature_csv(const std::string& path, const FeatureMatrix& features);

}  // namespace speclhs
