#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lanmsff/core.hpp"

namespace lanmsff::data {

/// Single-channel row-major image.
struct Image {
  std::size_t width = 0, height = 0;
  std::vector<real> pixels;

  Image() = default;
  Image(std::size_t w, std::size_t h, real fill = 0) : width(w), height(h), pixels(w * h, fill) {}

  real& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  real at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }

  /// Clamped access, i.e. border replication.
  real clamped(long x, long y) const {
    x = std::clamp<long>(x, 0, static_cast<long>(width) - 1);
    y = std::clamp<long>(y, 0, static_cast<long>(height) - 1);
    return pixels[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)];
  }

  /// Bilinear sample at continuous pixel-center coordinates with border replication.
  real bilinear(double x, double y) const {
    const double fx = std::floor(x), fy = std::floor(y);
    const long x0 = static_cast<long>(fx), y0 = static_cast<long>(fy);
    const double ax = x - fx, ay = y - fy;
    const double top = (1 - ax) * clamped(x0, y0) + ax * clamped(x0 + 1, y0);
    const double bot = (1 - ax) * clamped(x0, y0 + 1) + ax * clamped(x0 + 1, y0 + 1);
    return static_cast<real>((1 - ay) * top + ay * bot);
  }
};

/// Bilinear resize of the region [x0, x0+w) × [y0, y0+h) to out_w × out_h,
/// half-pixel centers.
inline Image resize_region(const Image& src, double x0, double y0, double w, double h, std::size_t out_w,
                           std::size_t out_h) {
  require(out_w > 0 && out_h > 0 && src.width > 0 && src.height > 0, ErrorKind::InvalidArgument,
          "resize needs non-empty images");
  Image out(out_w, out_h);
  const double sx = w / static_cast<double>(out_w), sy = h / static_cast<double>(out_h);
  for (std::size_t y = 0; y < out_h; ++y)
    for (std::size_t x = 0; x < out_w; ++x)
      out.at(x, y) = src.bilinear(x0 + (static_cast<double>(x) + 0.5) * sx - 0.5,
                                  y0 + (static_cast<double>(y) + 0.5) * sy - 0.5);
  return out;
}

inline Image resize_bilinear(const Image& src, std::size_t out_w, std::size_t out_h) {
  return resize_region(src, 0, 0, static_cast<double>(src.width), static_cast<double>(src.height), out_w, out_h);
}

/// Per-image min-max scaling to [0,1]. A constant image maps to all zeros.
inline void minmax_normalize(std::vector<real>& v) {
  if (v.empty()) return;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const real mn = *lo, range = *hi - *lo;
  if (range <= 0) {
    std::fill(v.begin(), v.end(), real(0));
    return;
  }
  for (real& x : v) x = std::clamp((x - mn) / range, real(0), real(1));
}

inline Image flip_horizontal(const Image& src) {
  Image out(src.width, src.height);
  for (std::size_t y = 0; y < src.height; ++y)
    for (std::size_t x = 0; x < src.width; ++x) out.at(x, y) = src.at(src.width - 1 - x, y);
  return out;
}

/// Rotation about the image center, bilinear, border replicate.
inline Image rotate(const Image& src, double degrees) {
  Image out(src.width, src.height);
  const double rad = degrees * 3.14159265358979323846 / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  const double cx = (static_cast<double>(src.width) - 1) / 2, cy = (static_cast<double>(src.height) - 1) / 2;
  for (std::size_t y = 0; y < src.height; ++y)
    for (std::size_t x = 0; x < src.width; ++x) {
      const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
      out.at(x, y) = src.bilinear(cx + c * dx + s * dy, cy - s * dx + c * dy);
    }
  return out;
}

/// ITU-R BT.601 luma of interleaved RGB bytes.
inline Image rgb_to_luma(const std::vector<unsigned char>& rgb, std::size_t w, std::size_t h) {
  require(rgb.size() == w * h * 3, ErrorKind::ShapeMismatch, "RGB buffer has ", rgb.size(), " bytes, expected ",
          w * h * 3);
  Image out(w, h);
  for (std::size_t i = 0; i < w * h; ++i)
    out.pixels[i] = static_cast<real>(0.299 * rgb[3 * i] + 0.587 * rgb[3 * i + 1] + 0.114 * rgb[3 * i + 2]);
  return out;
}

inline Image from_bytes(const std::vector<unsigned char>& gray, std::size_t w, std::size_t h) {
  require(gray.size() == w * h, ErrorKind::ShapeMismatch, "gray buffer has ", gray.size(), " bytes, expected ", w * h);
  Image out(w, h);
  for (std::size_t i = 0; i < w * h; ++i) out.pixels[i] = static_cast<real>(gray[i]);
  return out;
}

/// Resize a single-channel image to size × size and min-max normalize it.
inline std::vector<real> preprocess(const Image& img, std::size_t size) {
  Image r = (img.width == size && img.height == size) ? img : resize_bilinear(img, size, size);
  minmax_normalize(r.pixels);
  return std::move(r.pixels);
}

}  // namespace lanmsff::data
