#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lanmsff/data/image.hpp"
#include "lanmsff/data/image_io.hpp"
#include "lanmsff/data/schema.hpp"
#include "lanmsff/model/lanmsff.hpp"
#include "lanmsff/ops.hpp"

namespace lanmsff::eval {

enum class CamLayer {
  Block4PrePool,   // (84, S/8, S/8)
  Block4PostPool,  // (84, S/16, S/16)
  Block3Output,    // (78, S/8, S/8)
  Block2Output,    // (72, S/4, S/4)
};

inline const char* to_string(CamLayer l) {
  switch (l) {
    case CamLayer::Block4PrePool: return "block4_pre_pool";
    case CamLayer::Block4PostPool: return "block4_output";
    case CamLayer::Block3Output: return "block3_output";
    case CamLayer::Block2Output: return "block2_output";
  }
  return "?";
}

struct Heatmap {
  std::size_t size = 0;
  std::vector<real> values;  // size × size, in [0,1]
  int target_class = 0;
  std::string source_id;
  CamLayer layer = CamLayer::Block4PrePool;
  /// Set when every gradient at the tap was zero; the map is then flat zero.
  bool zero_gradient = false;
  Shape tap_shape;

  real at(std::size_t x, std::size_t y) const { return values[y * size + x]; }

  std::pair<std::size_t, std::size_t> argmax() const {
    const auto it = std::max_element(values.begin(), values.end());
    const auto i = static_cast<std::size_t>(it - values.begin());
    return {i % size, i / size};
  }
};

/// Grad-CAM from one sample's tap activations and gradients, both (C,h,w):
/// channel weights are spatial means of the gradients, the weighted channel
/// sum is rectified, bilinearly resized to out_size and min-max scaled.
/// A positive constant map becomes all ones.
inline Heatmap grad_cam_from_maps(std::span<const real> features, std::span<const real> gradients, std::size_t channels,
                                  std::size_t h, std::size_t w, std::size_t out_size) {
  require(features.size() == channels * h * w && gradients.size() == features.size(), ErrorKind::ShapeMismatch,
          "grad_cam: features/gradients must both hold C·h·w values");
  Heatmap hm;
  hm.size = out_size;
  hm.tap_shape = {channels, h, w};
  hm.zero_gradient = std::all_of(gradients.begin(), gradients.end(), [](real g) { return g == 0; });
  if (hm.zero_gradient) {
    hm.values.assign(out_size * out_size, real(0));
    return hm;
  }
  data::Image cam(w, h);
  const std::size_t plane = h * w;
  for (std::size_t c = 0; c < channels; ++c) {
    real weight = 0;
    for (std::size_t i = 0; i < plane; ++i) weight += gradients[c * plane + i];
    weight /= static_cast<real>(plane);
    for (std::size_t i = 0; i < plane; ++i) cam.pixels[i] += weight * features[c * plane + i];
  }
  for (real& v : cam.pixels) v = std::max(v, real(0));
  data::Image up = data::resize_bilinear(cam, out_size, out_size);
  const auto [lo, hi] = std::minmax_element(up.pixels.begin(), up.pixels.end());
  if (*hi > 0 && *hi == *lo)
    std::fill(up.pixels.begin(), up.pixels.end(), real(1));
  else
    data::minmax_normalize(up.pixels);
  hm.values = std::move(up.pixels);
  return hm;
}

/// Gradient of the target logit with respect to the chosen feature map.
inline Heatmap grad_cam(model::LanmsffModel& m, const data::Sample& sample, int target_class,
                        CamLayer layer = CamLayer::Block4PrePool) {
  const std::size_t k = m.config().num_classes;
  require(target_class >= 0 && static_cast<std::size_t>(target_class) < k, ErrorKind::InvalidArgument,
          "target class ", target_class, " outside ", k, " classes");
  data::Dataset one{sample};
  const std::size_t idx = 0;
  Tensor x = data::make_batch(one, std::span<const std::size_t>(&idx, 1));
  Tape tape;
  Tensor tap, logits;
  {
    TapeScope scope(tape);
    auto r = m.forward(x, {nn::Mode::Eval, 0});
    switch (layer) {
      case CamLayer::Block4PrePool: tap = r.block4_pre_pool; break;
      case CamLayer::Block4PostPool: tap = r.blocks[3]; break;
      case CamLayer::Block3Output: tap = r.blocks[2]; break;
      case CamLayer::Block2Output: tap = r.blocks[1]; break;
    }
    logits = r.logits;
  }
  tap.retain_grad();
  Tensor onehot({1, k}, real(0));
  onehot[static_cast<std::size_t>(target_class)] = 1;
  Tensor score;
  {
    TapeScope scope(tape);
    score = weighted_sum(logits, onehot);
  }
  tap.ensure_grad();
  if (score.requires_grad()) tape.backward(score);
  m.parameters().zero_grad();
  Heatmap hm = grad_cam_from_maps(tap.data(), tap.grad(), tap.dim(1), tap.dim(2), tap.dim(3), m.config().input_size);
  hm.target_class = target_class;
  hm.source_id = sample.source_id;
  hm.layer = layer;
  return hm;
}

inline nlohmann::json to_json(const Heatmap& h, const data::LabelSchema* schema = nullptr) {
  const auto [ax, ay] = h.argmax();
  nlohmann::json j{{"source_id", h.source_id},
                   {"target_class", h.target_class},
                   {"size", h.size},
                   {"layer", to_string(h.layer)},
                   {"tap_shape", h.tap_shape},
                   {"zero_gradient", h.zero_gradient},
                   {"argmax", {ax, ay}}};
  if (schema && static_cast<std::size_t>(h.target_class) < schema->size())
    j["class_name"] = schema->classes[static_cast<std::size_t>(h.target_class)];
  return j;
}

/// Writes <stem>.pgm and <stem>.json into `dir`.
inline void write_heatmap(const Heatmap& h, const std::filesystem::path& dir, const std::string& stem,
                          const data::LabelSchema* schema = nullptr) {
  std::filesystem::create_directories(dir);
  data::write_bytes(dir / (stem + ".pgm"), data::encode_pgm(h.values, h.size, h.size));
  std::ofstream f(dir / (stem + ".json"));
  require(static_cast<bool>(f), ErrorKind::Io, "cannot write heatmap sidecar in ", dir.string());
  f << to_json(h, schema).dump(2) << "\n";
}

}  // namespace lanmsff::eval
