#include "speclhs/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "speclhs/errors.hpp"

namespace speclhs {

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_value(const std::string& field) {
  if (field.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::string low = to_lower(field);
  if (low == "nan" || low == "na" || low == "null" || low == "none") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str()) return std::numeric_limits<double>::quiet_NaN();
  return v;
}

std::string path_stem(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = base.find_last_of('.');
  if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
  return base;
}

bool has_tiff_extension(const std::string& path) {
  const std::string low = to_lower(path);
  return low.size() >= 4 && (low.ends_with(".tif") || low.ends_with(".tiff"));
}

// Uniform positive spacing of a sorted unique coordinate axis.
double axis_spacing(const std::vector<double>& axis, const char* what) {
  if (axis.size() < 2) return 1.0;
  const double step = (axis.back() - axis.front()) / (axis.size() - 1);
  for (std::size_t i = 1; i < axis.size(); ++i) {
    const double d = axis[i] - axis[i - 1];
    if (std::abs(d - step) > 1e-6 * std::max(1.0, std::abs(step))) {
      throw UnreadableFile(std::string("irregular ") + what +
                           " spacing in delimited-text grid");
    }
  }
  return step;
}

std::size_t axis_position(const std::vector<double>& axis, double v) {
  auto it = std::lower_bound(axis.begin(), axis.end(), v - 1e-9);
  return static_cast<std::size_t>(it - axis.begin());
}

bool transforms_match(const std::array<double, 6>& a,
                      const std::array<double, 6>& b) {
  for (int i = 0; i < 6; ++i) {
    const double tol = 1e-6 * std::max({1.0, std::abs(a[i]), std::abs(b[i])});
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

}  // namespace

CovariateStack read_csv_stack(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UnreadableFile("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw UnreadableFile(path + " is empty");
  if (!line.empty() && line.front() == '\xEF') line = line.substr(3);  // BOM

  const std::vector<std::string> header = split_csv_line(line);
  int x_col = -1;
  int y_col = -1;
  std::vector<int> value_cols;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string low = to_lower(header[i]);
    if (low == "x" && x_col < 0) {
      x_col = static_cast<int>(i);
    } else if (low == "y" && y_col < 0) {
      y_col = static_cast<int>(i);
    } else {
      if (header[i].empty()) {
        throw UnreadableFile(path + ": empty covariate name in header");
      }
      value_cols.push_back(static_cast<int>(i));
      names.push_back(header[i]);
    }
  }
  if (names.empty()) throw UnreadableFile(path + ": no covariate columns");

  std::vector<double> xs, ys;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw UnreadableFile(path + ": row with " +
                           std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(header.size()));
    }
    std::vector<double> row(value_cols.size() + 2, 0.0);
    row[0] = x_col >= 0 ? parse_value(fields[x_col]) : 0.0;
    row[1] = y_col >= 0 ? parse_value(fields[y_col]) : 0.0;
    for (std::size_t j = 0; j < value_cols.size(); ++j) {
      row[2 + j] = parse_value(fields[value_cols[j]]);
    }
    if (x_col >= 0) xs.push_back(row[0]);
    if (y_col >= 0) ys.push_back(row[1]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw UnreadableFile(path + ": no data rows");

  CovariateStack stack;
  const bool spatial = x_col >= 0 && y_col >= 0;
  if (!spatial) {
    // No coordinates: treat the table as a single-row grid.
    stack.width = static_cast<int>(rows.size());
    stack.height = 1;
    stack.geo_transform = {0.0, 1.0, 0.0, 0.0, 0.0, -1.0};
    for (std::size_t b = 0; b < names.size(); ++b) {
      Band band;
      band.name = names[b];
      band.values.resize(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        band.values[i] = rows[i][2 + b];
      }
      stack.bands.push_back(std::move(band));
    }
    return stack;
  }

  for (double v : xs) {
    if (!std::isfinite(v)) throw UnreadableFile(path + ": non-finite X");
  }
  for (double v : ys) {
    if (!std::isfinite(v)) throw UnreadableFile(path + ": non-finite Y");
  }
  std::vector<double> ux = xs, uy = ys;
  std::sort(ux.begin(), ux.end());
  ux.erase(std::unique(ux.begin(), ux.end(),
                       [](double a, double b) { return std::abs(a - b) <= 1e-9; }),
           ux.end());
  std::sort(uy.begin(), uy.end());
  uy.erase(std::unique(uy.begin(), uy.end(),
                       [](double a, double b) { return std::abs(a - b) <= 1e-9; }),
           uy.end());

  const double dx = axis_spacing(ux, "X");
  const double dy = axis_spacing(uy, "Y");
  stack.width = static_cast<int>(ux.size());
  stack.height = static_cast<int>(uy.size());
  stack.geo_transform = {ux.front() - 0.5 * dx, dx, 0.0,
                         uy.back() + 0.5 * dy, 0.0, -dy};

  const std::size_t ncells =
      static_cast<std::size_t>(stack.width) * stack.height;
  std::vector<bool> seen(ncells, false);
  for (std::size_t b = 0; b < names.size(); ++b) {
    Band band;
    band.name = names[b];
    band.values.assign(ncells, std::numeric_limits<double>::quiet_NaN());
    stack.bands.push_back(std::move(band));
  }
  for (const auto& row : rows) {
    const std::size_t col = axis_position(ux, row[0]);
    // grid row 0 is the largest Y (north-up)
    const std::size_t grow = uy.size() - 1 - axis_position(uy, row[1]);
    const std::size_t cell = grow * stack.width + col;
    if (seen[cell]) {
      throw UnreadableFile(path + ": duplicate cell coordinates");
    }
    seen[cell] = true;
    for (std::size_t b = 0; b < names.size(); ++b) {
      stack.bands[b].values[cell] = row[2 + b];
    }
  }
  return stack;
}

CovariateStack load_stack(const std::vector<std::string>& paths,
                          const std::vector<std::string>& band_names) {
  if (paths.empty()) throw InvalidArgument("load_stack: no input paths");

  CovariateStack stack;
  bool first = true;
  for (const auto& path : paths) {
    CovariateStack part =
        has_tiff_extension(path) ? read_geotiff(path) : read_csv_stack(path);
    if (first) {
      stack.width = part.width;
      stack.height = part.height;
      stack.geo_transform = part.geo_transform;
      first = false;
    } else {
      if (part.width != stack.width || part.height != stack.height) {
        throw GridMismatch(path + ": grid " + std::to_string(part.width) + "x" +
                           std::to_string(part.height) + " differs from " +
                           std::to_string(stack.width) + "x" +
                           std::to_string(stack.height));
      }
      if (!transforms_match(part.geo_transform, stack.geo_transform)) {
        throw GridMismatch(path + ": geo transform differs beyond tolerance");
      }
    }
    for (auto& band : part.bands) stack.bands.push_back(std::move(band));
  }

  if (!band_names.empty()) {
    if (band_names.size() != stack.bands.size()) {
      throw InvalidArgument("band_names has " +
                            std::to_string(band_names.size()) +
                            " entries for " + std::to_string(stack.bands.size()) +
                            " bands");
    }
    for (std::size_t i = 0; i < band_names.size(); ++i) {
      stack.bands[i].name = band_names[i];
    }
  }

  std::map<std::string, int> counts;
  for (const auto& band : stack.bands) {
    if (band.name.empty()) throw InvalidArgument("empty band name");
    if (++counts[band.name] > 1) {
      throw InvalidArgument("duplicate band name '" + band.name +
                            "'; pass band_names to disambiguate");
    }
  }
  return stack;
}

}  // namespace speclhs
