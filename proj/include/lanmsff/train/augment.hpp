#pragma once

#include <array>
#include <functional>
#include <string>

#include "lanmsff/data/image.hpp"
#include "lanmsff/data/schema.hpp"

namespace lanmsff::train {

struct AugmentConfig {
  /// Crop edge as a fraction of the image edge (56 of 64).
  double crop_fraction = 56.0 / 64.0;
  double max_rotation_deg = 15.0;
};

namespace detail {

inline std::vector<data::Image> channels_of(const data::Sample& s) {
  std::vector<data::Image> out;
  const std::size_t plane = s.size * s.size;
  require(s.image.size() == s.channels * plane, ErrorKind::ShapeMismatch, "sample ", s.source_id,
          " image size does not match its geometry");
  for (std::size_t c = 0; c < s.channels; ++c) {
    data::Image img(s.size, s.size);
    std::copy_n(s.image.begin() + static_cast<std::ptrdiff_t>(c * plane), plane, img.pixels.begin());
    out.push_back(std::move(img));
  }
  return out;
}

inline data::Sample with_channels(const data::Sample& base, const std::vector<data::Image>& chans,
                                  const std::string& suffix) {
  data::Sample s = base;
  s.source_id = base.source_id + suffix;
  s.image.clear();
  for (const auto& c : chans)
    for (real v : c.pixels) s.image.push_back(std::clamp(v, real(0), real(1)));
  return s;
}

template <typename Fn>
data::Sample map_channels(const data::Sample& s, const std::string& suffix, Fn&& fn) {
  auto chans = channels_of(s);
  for (auto& c : chans) c = fn(c);
  return with_channels(s, chans, suffix);
}

}  // namespace detail

inline data::Sample flip_sample(const data::Sample& s) {
  return detail::map_channels(s, "#flip", [](const data::Image& c) { return data::flip_horizontal(c); });
}

inline data::Sample rotate_sample(const data::Sample& s, double degrees) {
  return detail::map_channels(s, "#rot", [&](const data::Image& c) { return data::rotate(c, degrees); });
}

inline data::Sample crop_sample(const data::Sample& s, std::size_t x0, std::size_t y0, std::size_t edge) {
  require(x0 + edge <= s.size && y0 + edge <= s.size && edge > 0, ErrorKind::InvalidArgument,
          "crop window outside the image");
  return detail::map_channels(s, "#crop", [&](const data::Image& c) {
    const double e = static_cast<double>(edge);
    return data::resize_region(c, static_cast<double>(x0), static_cast<double>(y0), e, e, s.size, s.size);
  });
}

/// Three synthetic variants of one sample: random crop resized back,
/// random rotation, horizontal flip. `seed` fixes every random choice.
inline std::array<data::Sample, 3> augment(const data::Sample& s, std::uint64_t seed, const AugmentConfig& cfg = {}) {
  Rng rng(seed);
  const auto edge = static_cast<std::size_t>(std::lround(cfg.crop_fraction * static_cast<double>(s.size)));
  const std::size_t span = s.size - edge + 1;
  const std::size_t x0 = rng.index(span), y0 = rng.index(span);
  const double angle = rng.uniform(-cfg.max_rotation_deg, cfg.max_rotation_deg);
  return {crop_sample(s, x0, y0, edge), rotate_sample(s, angle), flip_sample(s)};
}

/// Per-sample augmentation seed; depends only on the run seed and the
/// sample's identity, so results do not depend on processing order.
inline std::uint64_t sample_seed(std::uint64_t seed, const data::Sample& s) {
  Fnv1a h;
  h.update(s.source_id);
  return mix_seed(seed, h.digest());
}

/// Originals followed by their three variants each: 4M samples from M.
inline data::Dataset augment_dataset(const data::Dataset& d, std::uint64_t seed, const AugmentConfig& cfg = {}) {
  data::Dataset out = d;
  out.reserve(4 * d.size());
  for (const auto& s : d)
    for (auto& v : augment(s, sample_seed(seed, s), cfg)) out.push_back(std::move(v));
  return out;
}

}  // namespace lanmsff::train
