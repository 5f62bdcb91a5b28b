#pragma once

#include <array>
#include <string>

#include "json.hpp"
#include "lanmsff/blocks/dual_path_block.hpp"

namespace lanmsff::model {

/// Architecture hyperparameters. Defaults reproduce the published network:
/// widths 66/72/78/84, grayscale 64×64 input, seven classes.
struct LanmsffConfig {
  std::size_t input_channels = 1;
  std::size_t num_classes = 7;
  std::array<std::size_t, 4> block_widths{66, 72, 78, 84};
  bool enable_massatt = true;
  bool enable_pwfs = true;
  real dropout_rate = real(0.25);
  std::size_t input_size = 64;
  std::size_t mass_att_reduction = 4;
  blocks::PathWiring wiring = blocks::PathWiring::CrossPathSharing;
  nn::BatchNormOptions bn;

  /// Small network for gradient checks and fast training tests.
  static LanmsffConfig miniature(std::size_t classes = 3) {
    LanmsffConfig c;
    c.num_classes = classes;
    c.block_widths = {6, 12, 6, 8};
    c.input_size = 32;
    return c;
  }

  void validate() const {
    const auto& w = block_widths;
    require(input_channels == 1 || input_channels == 3, ErrorKind::InvalidConfig,
            "input_channels must be 1 or 3, got ", input_channels);
    require(num_classes >= 2, ErrorKind::InvalidConfig, "num_classes must be at least 2, got ", num_classes);
    for (std::size_t i = 0; i < 4; ++i)
      require(w[i] > 0 && w[i] % 2 == 0, ErrorKind::InvalidConfig, "block ", i + 1, " width must be even, got ",
              w[i]);
    if (enable_pwfs)
      for (std::size_t i = 0; i < 3; ++i)
        require(w[i] % 3 == 0, ErrorKind::InvalidConfig, "block ", i + 1, " width ", w[i],
                " must be divisible by 3 for point-wise feature selection");
    if (enable_massatt)
      for (std::size_t i : {1, 3})
        require(w[i] % mass_att_reduction == 0, ErrorKind::InvalidConfig, "block ", i + 1, " width ", w[i],
                " must be divisible by the attention reduction factor ", mass_att_reduction);
    require(input_size > 0 && input_size % 32 == 0, ErrorKind::InvalidConfig, "input_size must be a multiple of 32, got ",
            input_size);
    require(dropout_rate >= 0 && dropout_rate < 1, ErrorKind::InvalidConfig, "dropout_rate must be in [0,1), got ",
            dropout_rate);
  }

  /// Length of the fused descriptor fed to the classifier.
  std::size_t fusion_length() const {
    const auto& w = block_widths;
    if (enable_pwfs) return w[0] / 3 + w[1] / 3 + w[2] / 3 + w[3];
    return w[0] + w[1] + w[2] + w[3];
  }

  /// Spatial extent after block i (0-based).
  std::size_t block_extent(std::size_t i) const { return input_size >> (i + 1); }

  /// Canonical description of everything that changes parameter shapes or
  /// the parameter list.
  std::string architecture_key() const {
    std::string s = "lanmsff/v1;cin=" + std::to_string(input_channels) + ";classes=" + std::to_string(num_classes) +
                    ";widths=";
    for (auto w : block_widths) s += std::to_string(w) + ",";
    s += ";massatt=" + std::to_string(enable_massatt) + ";pwfs=" + std::to_string(enable_pwfs) +
         ";r=" + std::to_string(mass_att_reduction) + ";wiring=" +
         std::to_string(static_cast<int>(wiring)) + ";size=" + std::to_string(input_size);
    return s;
  }

  std::uint64_t architecture_hash() const {
    Fnv1a h;
    h.update(architecture_key());
    return h.digest();
  }
};

inline nlohmann::json to_json(const LanmsffConfig& c) {
  return {{"input_channels", c.input_channels},
          {"num_classes", c.num_classes},
          {"block_widths", c.block_widths},
          {"enable_massatt", c.enable_massatt},
          {"enable_pwfs", c.enable_pwfs},
          {"dropout_rate", c.dropout_rate},
          {"input_size", c.input_size},
          {"mass_att_reduction", c.mass_att_reduction},
          {"wiring", c.wiring == blocks::PathWiring::CrossPathSharing ? "cross_path_sharing" : "independent"},
          {"bn_momentum", c.bn.momentum},
          {"bn_epsilon", c.bn.epsilon},
          {"fusion_length", c.fusion_length()}};
}

inline LanmsffConfig config_from_json(const nlohmann::json& j) {
  LanmsffConfig c;
  c.input_channels = j.value("input_channels", c.input_channels);
  c.num_classes = j.value("num_classes", c.num_classes);
  if (j.contains("block_widths")) c.block_widths = j.at("block_widths").get<std::array<std::size_t, 4>>();
  c.enable_massatt = j.value("enable_massatt", c.enable_massatt);
  c.enable_pwfs = j.value("enable_pwfs", c.enable_pwfs);
  c.dropout_rate = j.value("dropout_rate", c.dropout_rate);
  c.input_size = j.value("input_size", c.input_size);
  c.mass_att_reduction = j.value("mass_att_reduction", c.mass_att_reduction);
  if (j.contains("wiring"))
    c.wiring = j.at("wiring").get<std::string>() == "independent" ? blocks::PathWiring::Independent
                                                                  : blocks::PathWiring::CrossPathSharing;
  c.bn.momentum = j.value("bn_momentum", c.bn.momentum);
  c.bn.epsilon = j.value("bn_epsilon", c.bn.epsilon);
  return c;
}

}  // namespace lanmsff::model
