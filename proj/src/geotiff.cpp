#include <tiffio.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "speclhs/errors.hpp"
#include "speclhs/raster.hpp"

namespace speclhs {

namespace {

// GeoTIFF placement tags plus GDAL's nodata tag. libtiff does not know
// them natively; they are registered through the tag-extender hook.
constexpr ttag_t kTagPixelScale = 33550;
constexpr ttag_t kTagTiePoints = 33922;
constexpr ttag_t kTagTransformation = 34264;
constexpr ttag_t kTagGdalNodata = 42113;

const TIFFFieldInfo kGeoFieldInfo[] = {
    {kTagPixelScale, TIFF_VARIABLE, TIFF_VARIABLE, TIFF_DOUBLE, FIELD_CUSTOM,
     1, 1, const_cast<char*>("GeoPixelScale")},
    {kTagTiePoints, TIFF_VARIABLE, TIFF_VARIABLE, TIFF_DOUBLE, FIELD_CUSTOM,
     1, 1, const_cast<char*>("GeoTiePoints")},
    {kTagTransformation, TIFF_VARIABLE, TIFF_VARIABLE, TIFF_DOUBLE,
     FIELD_CUSTOM, 1, 1, const_cast<char*>("GeoTransformationMatrix")},
    {kTagGdalNodata, TIFF_VARIABLE, TIFF_VARIABLE, TIFF_ASCII, FIELD_CUSTOM,
     1, 0, const_cast<char*>("GDALNoDataValue")},
};

TIFFExtendProc g_parent_extender = nullptr;

void geo_tag_extender(TIFF* tif) {
  TIFFMergeFieldInfo(tif, kGeoFieldInfo,
                     sizeof(kGeoFieldInfo) / sizeof(kGeoFieldInfo[0]));
  if (g_parent_extender) g_parent_extender(tif);
}

void ensure_tiff_setup() {
  static const bool done = [] {
    g_parent_extender = TIFFSetTagExtender(geo_tag_extender);
    TIFFSetWarningHandler(nullptr);
    return true;
  }();
  (void)done;
}

struct SampleLayout {
  std::uint16_t format = SAMPLEFORMAT_UINT;
  std::uint16_t bits = 8;
};

double convert_sample(const std::uint8_t* raw, const SampleLayout& layout) {
  switch (layout.format) {
    case SAMPLEFORMAT_UINT:
      switch (layout.bits) {
        case 8: return *raw;
        case 16: { std::uint16_t v; std::memcpy(&v, raw, 2); return v; }
        case 32: { std::uint32_t v; std::memcpy(&v, raw, 4); return v; }
      }
      break;
    case SAMPLEFORMAT_INT:
      switch (layout.bits) {
        case 8: return *reinterpret_cast<const std::int8_t*>(raw);
        case 16: { std::int16_t v; std::memcpy(&v, raw, 2); return v; }
        case 32: { std::int32_t v; std::memcpy(&v, raw, 4); return v; }
      }
      break;
    case SAMPLEFORMAT_IEEEFP:
      switch (layout.bits) {
        case 32: { float v; std::memcpy(&v, raw, 4); return v; }
        case 64: { double v; std::memcpy(&v, raw, 8); return v; }
      }
      break;
    default:
      break;
  }
  throw UnreadableFile("unsupported TIFF sample layout: format " +
                       std::to_string(layout.format) + ", " +
                       std::to_string(layout.bits) + " bits");
}

// Copies decoded pixels from a scanline/tile buffer into the band grids.
void scatter_pixels(const std::uint8_t* buf, std::uint32_t count,
                    const SampleLayout& layout, std::uint16_t spp,
                    bool contig, std::uint16_t plane,
                    std::vector<Band>& bands, std::size_t band_base,
                    std::size_t cell_base, std::uint32_t stride_cells,
                    std::uint32_t row_len) {
  const std::size_t bytes = layout.bits / 8;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t r = i / row_len;
    const std::uint32_t c = i % row_len;
    const std::size_t cell = cell_base + static_cast<std::size_t>(r) * stride_cells + c;
    if (contig) {
      for (std::uint16_t s = 0; s < spp; ++s) {
        const std::uint8_t* raw = buf + (static_cast<std::size_t>(i) * spp + s) * bytes;
        bands[band_base + s].values[cell] = convert_sample(raw, layout);
      }
    } else {
      bands[band_base + plane].values[cell] = convert_sample(buf + i * bytes, layout);
    }
  }
}

std::string file_stem(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = base.find_last_of('.');
  if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
  return base;
}

}  // namespace

CovariateStack read_geotiff(const std::string& path) {
  ensure_tiff_setup();
  TIFF* tif = TIFFOpen(path.c_str(), "r");
  if (!tif) throw UnreadableFile("cannot open " + path + " as TIFF");

  CovariateStack stack;
  bool geo_read = false;
  int dir = 0;
  try {
    do {
      std::uint32_t w = 0, h = 0;
      if (!TIFFGetField(tif, TIFFTAG_IMAGEWIDTH, &w) ||
          !TIFFGetField(tif, TIFFTAG_IMAGELENGTH, &h) || w == 0 || h == 0) {
        throw UnreadableFile(path + ": missing image dimensions");
      }
      if (dir == 0) {
        stack.width = static_cast<int>(w);
        stack.height = static_cast<int>(h);
      } else if (static_cast<int>(w) != stack.width ||
                 static_cast<int>(h) != stack.height) {
        throw GridMismatch(path + ": directories disagree on grid size");
      }

      std::uint16_t spp = 1, planar = PLANARCONFIG_CONTIG;
      SampleLayout layout;
      TIFFGetFieldDefaulted(tif, TIFFTAG_SAMPLESPERPIXEL, &spp);
      TIFFGetFieldDefaulted(tif, TIFFTAG_BITSPERSAMPLE, &layout.bits);
      TIFFGetFieldDefaulted(tif, TIFFTAG_SAMPLEFORMAT, &layout.format);
      TIFFGetFieldDefaulted(tif, TIFFTAG_PLANARCONFIG, &planar);
      if (layout.bits % 8 != 0) {
        throw UnreadableFile(path + ": sub-byte samples not supported");
      }

      if (dir == 0) {
        std::uint16_t count = 0;
        double* vals = nullptr;
        if (TIFFGetField(tif, kTagTransformation, &count, &vals) && count >= 8) {
          stack.geo_transform = {vals[3], vals[0], vals[1],
                                 vals[7], vals[4], vals[5]};
          geo_read = true;
        } else if (TIFFGetField(tif, kTagPixelScale, &count, &vals) &&
                   count >= 2) {
          const double sx = vals[0];
          const double sy = vals[1];
          double ox = 0.0, oy = 0.0;
          std::uint16_t tcount = 0;
          double* tie = nullptr;
          if (TIFFGetField(tif, kTagTiePoints, &tcount, &tie) && tcount >= 6) {
            ox = tie[3] - tie[0] * sx;
            oy = tie[4] + tie[1] * sy;
          }
          stack.geo_transform = {ox, sx, 0.0, oy, 0.0, -sy};
          geo_read = true;
        }
      }

      std::optional<double> nodata;
      {
        char* text = nullptr;
        if (TIFFGetField(tif, kTagGdalNodata, &text) && text) {
          char* end = nullptr;
          const double v = std::strtod(text, &end);
          if (end != text) nodata = v;
        }
      }

      const std::size_t band_base = stack.bands.size();
      const std::size_t ncells = static_cast<std::size_t>(w) * h;
      for (std::uint16_t s = 0; s < spp; ++s) {
        Band band;
        band.values.assign(ncells, std::numeric_limits<double>::quiet_NaN());
        band.nodata = nodata;
        stack.bands.push_back(std::move(band));
      }

      const std::uint16_t planes = planar == PLANARCONFIG_SEPARATE ? spp : 1;
      const bool contig = planar == PLANARCONFIG_CONTIG;
      if (TIFFIsTiled(tif)) {
        std::uint32_t tw = 0, th = 0;
        TIFFGetField(tif, TIFFTAG_TILEWIDTH, &tw);
        TIFFGetField(tif, TIFFTAG_TILELENGTH, &th);
        std::vector<std::uint8_t> buf(TIFFTileSize(tif));
        for (std::uint16_t p = 0; p < planes; ++p) {
          for (std::uint32_t ty = 0; ty < h; ty += th) {
            for (std::uint32_t tx = 0; tx < w; tx += tw) {
              if (TIFFReadTile(tif, buf.data(), tx, ty, 0, p) < 0) {
                throw UnreadableFile(path + ": tile read failed");
              }
              const std::uint32_t cols = std::min(tw, w - tx);
              const std::uint32_t rows = std::min(th, h - ty);
              // tiles are padded to tw columns; scatter row by row
              for (std::uint32_t r = 0; r < rows; ++r) {
                scatter_pixels(buf.data() +
                                   static_cast<std::size_t>(r) * tw *
                                       (contig ? spp : 1) * (layout.bits / 8),
                               cols, layout, spp, contig, p, stack.bands,
                               band_base,
                               static_cast<std::size_t>(ty + r) * w + tx, w,
                               cols);
              }
            }
          }
        }
      } else {
        std::vector<std::uint8_t> buf(TIFFScanlineSize(tif));
        for (std::uint16_t p = 0; p < planes; ++p) {
          for (std::uint32_t row = 0; row < h; ++row) {
            if (TIFFReadScanline(tif, buf.data(), row, p) < 0) {
              throw UnreadableFile(path + ": scanline read failed at row " +
                                   std::to_string(row));
            }
            scatter_pixels(buf.data(), w, layout, spp, contig, p, stack.bands,
                           band_base, static_cast<std::size_t>(row) * w, w, w);
          }
        }
      }
      ++dir;
    } while (TIFFReadDirectory(tif));
  } catch (...) {
    TIFFClose(tif);
    throw;
  }
  TIFFClose(tif);
  (void)geo_read;

  const std::string stem = file_stem(path);
  if (stack.bands.size() == 1) {
    stack.bands[0].name = stem;
  } else {
    for (std::size_t i = 0; i < stack.bands.size(); ++i) {
      stack.bands[i].name = stem + "_b" + std::to_string(i + 1);
    }
  }
  return stack;
}

void write_geotiff(const std::string& path, const CovariateStack& stack) {
  if (stack.bands.empty() || stack.width <= 0 || stack.height <= 0) {
    throw InvalidArgument("write_geotiff: empty stack");
  }
  ensure_tiff_setup();
  TIFF* tif = TIFFOpen(path.c_str(), "w");
  if (!tif) throw FileWriteError("cannot create " + path);

  const std::uint32_t w = static_cast<std::uint32_t>(stack.width);
  const std::uint32_t h = static_cast<std::uint32_t>(stack.height);
  const std::uint16_t spp = static_cast<std::uint16_t>(stack.bands.size());

  TIFFSetField(tif, TIFFTAG_IMAGEWIDTH, w);
  TIFFSetField(tif, TIFFTAG_IMAGELENGTH, h);
  TIFFSetField(tif, TIFFTAG_SAMPLESPERPIXEL, spp);
  TIFFSetField(tif, TIFFTAG_BITSPERSAMPLE, static_cast<std::uint16_t>(32));
  TIFFSetField(tif, TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_IEEEFP);
  TIFFSetField(tif, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
  TIFFSetField(tif, TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
  TIFFSetField(tif, TIFFTAG_COMPRESSION, COMPRESSION_NONE);
  TIFFSetField(tif, TIFFTAG_ROWSPERSTRIP, TIFFDefaultStripSize(tif, 0));
  if (spp > 1) {
    std::vector<std::uint16_t> extra(spp - 1, EXTRASAMPLE_UNSPECIFIED);
    TIFFSetField(tif, TIFFTAG_EXTRASAMPLES,
                 static_cast<std::uint16_t>(extra.size()), extra.data());
  }

  const auto& gt = stack.geo_transform;
  if (gt[2] == 0.0 && gt[4] == 0.0 && gt[5] < 0.0) {
    const double scale[3] = {gt[1], -gt[5], 0.0};
    const double tie[6] = {0.0, 0.0, 0.0, gt[0], gt[3], 0.0};
    TIFFSetField(tif, kTagPixelScale, static_cast<std::uint16_t>(3), scale);
    TIFFSetField(tif, kTagTiePoints, static_cast<std::uint16_t>(6), tie);
  } else {
    const double m[16] = {gt[1], gt[2], 0.0, gt[0], gt[4], gt[5], 0.0, gt[3],
                          0.0,   0.0,   0.0, 0.0,  0.0,   0.0,   0.0, 1.0};
    TIFFSetField(tif, kTagTransformation, static_cast<std::uint16_t>(16), m);
  }
  if (stack.bands[0].nodata) {
    char text[64];
    std::snprintf(text, sizeof(text), "%.17g", *stack.bands[0].nodata);
    TIFFSetField(tif, kTagGdalNodata, text);
  }

  std::vector<float> line(static_cast<std::size_t>(w) * spp);
  for (std::uint32_t row = 0; row < h; ++row) {
    for (std::uint32_t col = 0; col < w; ++col) {
      for (std::uint16_t s = 0; s < spp; ++s) {
        line[static_cast<std::size_t>(col) * spp + s] = static_cast<float>(
            stack.bands[s].values[static_cast<std::size_t>(row) * w + col]);
      }
    }
    if (TIFFWriteScanline(tif, line.data(), row, 0) < 0) {
      TIFFClose(tif);
      throw FileWriteError(path + ": scanline write failed");
    }
  }
  TIFFClose(tif);
}

}  // namespace speclhs
