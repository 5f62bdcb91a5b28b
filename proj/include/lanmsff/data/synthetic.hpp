#pragma once

#include <array>
#include <string>
#include <vector>

#include "lanmsff/data/image.hpp"
#include "lanmsff/data/schema.hpp"

namespace lanmsff::data {

/// Axis-aligned box [x0, x1) × [y0, y1).
struct Box {
  std::size_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool contains(std::size_t x, std::size_t y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

struct SyntheticSet {
  Dataset samples;
  std::vector<Box> squares;  // parallel to samples; empty box when absent
};

struct SyntheticOptions {
  std::size_t count = 64;
  std::size_t classes = 7;
  std::size_t size = 64;
  std::size_t channels = 1;
  std::uint64_t seed = 0;
  real noise = real(0.3);
  /// Class 0 has no square; other classes place a bright square in a
  /// class-specific region of the image.
  bool blank_class_zero = false;
  /// Place each square uniformly at random instead of in its class region,
  /// so only the square's presence carries the label.
  bool random_placement = false;
  Split split = Split::Train;
  std::string prefix = "syn";
};

/// Noise in [0, noise) with a bright square of value 1 whose placement
/// depends on the class. Pose tags cycle through the five KDEF angles.
inline SyntheticSet synthetic_dataset(const SyntheticOptions& o) {
  require(o.classes >= 2 && o.size >= 8, ErrorKind::InvalidArgument, "synthetic set needs >=2 classes and size >=8");
  SyntheticSet set;
  Rng rng(o.seed);
  const std::size_t edge = o.size / 4;
  const std::size_t grid = 3;
  const std::size_t cell = (o.size - edge) / grid;
  for (std::size_t i = 0; i < o.count; ++i) {
    Sample s;
    s.size = o.size;
    s.channels = o.channels;
    s.label = static_cast<int>(i % o.classes);
    s.pose = kPoseAngles[i % 5];
    s.split = o.split;
    s.source_id = o.prefix + std::to_string(i);
    Box box;
    const bool has_square = !(o.blank_class_zero && s.label == 0);
    if (has_square && o.random_placement) {
      box.x0 = rng.index(o.size - edge + 1);
      box.y0 = rng.index(o.size - edge + 1);
      box.x1 = box.x0 + edge;
      box.y1 = box.y0 + edge;
    } else if (has_square) {
      const std::size_t slot = (static_cast<std::size_t>(s.label) * 4) % (grid * grid);
      const std::size_t jx = rng.index(cell / 2 + 1), jy = rng.index(cell / 2 + 1);
      box.x0 = (slot % grid) * cell + jx;
      box.y0 = (slot / grid) * cell + jy;
      box.x1 = box.x0 + edge;
      box.y1 = box.y0 + edge;
    }
    for (std::size_t c = 0; c < o.channels; ++c) {
      std::vector<real> plane(o.size * o.size);
      for (std::size_t y = 0; y < o.size; ++y)
        for (std::size_t x = 0; x < o.size; ++x)
          plane[y * o.size + x] = (has_square && box.contains(x, y)) ? real(1) : o.noise * static_cast<real>(rng.uniform());
      s.image.insert(s.image.end(), plane.begin(), plane.end());
    }
    set.samples.push_back(std::move(s));
    set.squares.push_back(box);
  }
  return set;
}

}  // namespace lanmsff::data
