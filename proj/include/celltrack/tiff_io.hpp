#pragma once

// Single-channel TIFF read/write on top of libtiff. Requires linking TIFF.

#include <tiffio.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "celltrack/image.hpp"

namespace celltrack {

namespace detail {

struct TiffCloser {
  void operator()(TIFF* t) const noexcept {
    if (t != nullptr) TIFFClose(t);
  }
};
using TiffHandle = std::unique_ptr<TIFF, TiffCloser>;

inline TiffHandle open_tiff(const std::filesystem::path& path, const char* mode) {
  TIFFSetWarningHandler(nullptr);
  TIFFSetErrorHandler(nullptr);
  TiffHandle h(TIFFOpen(path.string().c_str(), mode));
  if (!h) throw std::runtime_error("cannot open TIFF " + path.string());
  return h;
}

}  // namespace detail

/// Pixel data of a single-channel TIFF with its storage type.
struct TiffImage {
  std::size_t width = 0;
  std::size_t height = 0;
  unsigned bits_per_sample = 0;
  bool is_float = false;
  std::vector<double> samples;  // row-major
};

inline TiffImage read_tiff(const std::filesystem::path& path) {
  auto tif = detail::open_tiff(path, "r");
  std::uint32_t w = 0, h = 0;
  std::uint16_t bps = 0, spp = 1, fmt = SAMPLEFORMAT_UINT, planar = PLANARCONFIG_CONTIG;
  TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &w);
  TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &h);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bps);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLEFORMAT, &fmt);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);
  if (spp != 1) throw std::runtime_error(path.string() + ": expected one channel, found " + std::to_string(spp));
  const bool is_float = fmt == SAMPLEFORMAT_IEEEFP;
  const bool supported = (!is_float && fmt == SAMPLEFORMAT_UINT && (bps == 8 || bps == 16 || bps == 32)) ||
                         (is_float && bps == 32);
  if (!supported) {
    throw std::runtime_error(path.string() + ": unsupported sample type (" + std::to_string(bps) + " bit, format " +
                             std::to_string(fmt) + ")");
  }

  TiffImage img{w, h, bps, is_float, std::vector<double>(static_cast<std::size_t>(w) * h)};
  std::vector<std::uint8_t> row(static_cast<std::size_t>(TIFFScanlineSize(tif.get())));
  for (std::uint32_t y = 0; y < h; ++y) {
    if (TIFFReadScanline(tif.get(), row.data(), y, 0) < 0) {
      throw std::runtime_error(path.string() + ": failed reading row " + std::to_string(y));
    }
    double* dst = img.samples.data() + static_cast<std::size_t>(y) * w;
    for (std::uint32_t x = 0; x < w; ++x) {
      if (is_float) {
        float v;
        std::memcpy(&v, row.data() + 4 * x, 4);
        dst[x] = v;
      } else if (bps == 8) {
        dst[x] = row[x];
      } else if (bps == 16) {
        std::uint16_t v;
        std::memcpy(&v, row.data() + 2 * x, 2);
        dst[x] = v;
      } else {
        std::uint32_t v;
        std::memcpy(&v, row.data() + 4 * x, 4);
        dst[x] = v;
      }
    }
  }
  return img;
}

inline IntensityImage to_intensity(const TiffImage& t) {
  IntensityImage img(t.width, t.height);
  for (std::size_t i = 0; i < t.samples.size(); ++i) img[i] = static_cast<float>(t.samples[i]);
  return img;
}

inline LabelImage to_labels(const TiffImage& t, const std::string& source) {
  if (t.is_float) throw std::runtime_error(source + ": label images must be integer typed");
  LabelImage img(t.width, t.height);
  for (std::size_t i = 0; i < t.samples.size(); ++i) img[i] = static_cast<Label>(t.samples[i]);
  return img;
}

/// Writes an uncompressed single-strip TIFF. T is uint8_t, uint16_t or float.
template <typename T>
void write_tiff(const std::filesystem::path& path, const Image<T>& img) {
  static_assert(std::is_same_v<T, std::uint8_t> || std::is_same_v<T, std::uint16_t> || std::is_same_v<T, float>,
                "unsupported TIFF sample type");
  auto tif = detail::open_tiff(path, "w");
  const auto w = static_cast<std::uint32_t>(img.width());
  const auto h = static_cast<std::uint32_t>(img.height());
  TIFFSetField(tif.get(), TIFFTAG_IMAGEWIDTH, w);
  TIFFSetField(tif.get(), TIFFTAG_IMAGELENGTH, h);
  TIFFSetField(tif.get(), TIFFTAG_SAMPLESPERPIXEL, static_cast<std::uint16_t>(1));
  TIFFSetField(tif.get(), TIFFTAG_BITSPERSAMPLE, static_cast<std::uint16_t>(8 * sizeof(T)));
  TIFFSetField(tif.get(), TIFFTAG_SAMPLEFORMAT,
               static_cast<std::uint16_t>(std::is_same_v<T, float> ? SAMPLEFORMAT_IEEEFP : SAMPLEFORMAT_UINT));
  TIFFSetField(tif.get(), TIFFTAG_PHOTOMETRIC, static_cast<std::uint16_t>(PHOTOMETRIC_MINISBLACK));
  TIFFSetField(tif.get(), TIFFTAG_PLANARCONFIG, static_cast<std::uint16_t>(PLANARCONFIG_CONTIG));
  TIFFSetField(tif.get(), TIFFTAG_COMPRESSION, static_cast<std::uint16_t>(COMPRESSION_NONE));
  TIFFSetField(tif.get(), TIFFTAG_ROWSPERSTRIP, h);

  std::vector<T> row(img.width());
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) row[x] = img(x, y);
    if (TIFFWriteScanline(tif.get(), row.data(), y, 0) < 0) {
      throw std::runtime_error(path.string() + ": failed writing row " + std::to_string(y));
    }
  }
  if (!TIFFWriteDirectory(tif.get())) throw std::runtime_error("failed finalizing " + path.string());
}

/// Narrows a field to an integer sample type, rejecting out-of-range values.
template <typename Out, typename In>
Image<Out> narrow_image(const Image<In>& in, const std::string& what) {
  Image<Out> out(in.width(), in.height());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double v = static_cast<double>(in[i]);
    if (v < 0.0 || v > static_cast<double>(std::numeric_limits<Out>::max()) || v != std::floor(v)) {
      throw std::runtime_error(what + ": value " + std::to_string(v) + " does not fit " +
                               std::to_string(8 * sizeof(Out)) + "-bit unsigned storage");
    }
    out[i] = static_cast<Out>(v);
  }
  return out;
}

}  // namespace celltrack
