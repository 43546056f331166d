#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace speclhs {

/// One covariate layer on the common grid, row-major (row * width + col).
struct Band {
  std::string name;
  std::vector<double> values;
  std::optional<double> nodata;
};

/// A co-registered stack of covariate layers.
///
/// geo_transform follows the usual 6-coefficient affine convention:
///   x = gt[0] + col * gt[1] + row * gt[2]
///   y = gt[3] + col * gt[4] + row * gt[5]
/// with (row, col) = (0, 0) at the top-left *corner* of the grid.
struct CovariateStack {
  int width = 0;
  int height = 0;
  std::array<double, 6> geo_transform{0.0, 1.0, 0.0, 0.0, 0.0, -1.0};
  std::vector<Band> bands;

  double value(std::size_t band, int row, int col) const {
    return bands[band].values[static_cast<std::size_t>(row) * width + col];
  }

  /// Map coordinates of a cell's center.
  std::pair<double, double> cell_center(int row, int col) const {
    const double c = col + 0.5;
    const double r = row + 0.5;
    return {geo_transform[0] + c * geo_transform[1] + r * geo_transform[2],
            geo_transform[3] + c * geo_transform[4] + r * geo_transform[5]};
  }
};

/// Loads one or more raster files (GeoTIFF or headered delimited text) into
/// a single stack. Bands keep input order; the transform comes from the
/// first file. Throws UnreadableFile or GridMismatch.
///
/// band_names, when non-empty, renames the stacked bands and must match the
/// total band count.
CovariateStack load_stack(const std::vector<std::string>& paths,
                          const std::vector<std::string>& band_names = {});

/// GeoTIFF reader built on libtiff. Handles stripped and tiled layouts,
/// contiguous and separate planes, 8/16/32-bit integer and 32/64-bit float
/// samples, multiple directories, GeoTIFF placement tags, and the GDAL
/// nodata tag.
CovariateStack read_geotiff(const std::string& path);

/// Writes a stack as a striped float32 GeoTIFF (pixel-scale + tiepoint tags
/// when north-up, full model transformation otherwise).
void write_geotiff(const std::string& path, const CovariateStack& stack);

/// Delimited-text fallback: header row of covariate names, one line per
/// cell, optional X/Y columns defining a regular grid.
CovariateStack read_csv_stack(const std::string& path);

}  // namespace speclhs
