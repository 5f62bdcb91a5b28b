#pragma once

#include <string>

#include "lanmsff/nn/activation.hpp"
#include "lanmsff/nn/conv.hpp"
#include "lanmsff/nn/dense.hpp"
#include "lanmsff/nn/init.hpp"
#include "lanmsff/nn/pool.hpp"
#include "lanmsff/ops.hpp"

namespace lanmsff::blocks {

/// Mass attention weights.
///   channel path: Z0 (C/r × C), Z1 (C × C/r), dense layers with biases
///   spatial path: Z2 conv 2×1×3×3, Z3 conv 4×2×3×3 (stride 2, same padding),
///                 Z4 transposed 4×4×3×3, Z5 transposed 1×4×3×3 (stride 2)
struct MassAttWeights {
  std::size_t channels = 0;
  std::size_t reduction = 4;
  Tensor z0, b0, z1, b1, z2, b2, z3, b3, z4, b4, z5, b5;

  std::size_t hidden() const { return channels / reduction; }

  static nn::ConvSpec z2_spec() {
    nn::ConvSpec s;
    s.in_channels = 1;
    s.out_channels = 2;
    s.stride = {2, 2};
    return s;
  }
  static nn::ConvSpec z3_spec() {
    nn::ConvSpec s;
    s.in_channels = 2;
    s.out_channels = 4;
    s.stride = {2, 2};
    return s;
  }
  static nn::TransposedConvSpec z4_spec() { return {4, 4, {3, 3}, {2, 2}, true}; }
  static nn::TransposedConvSpec z5_spec() { return {4, 1, {3, 3}, {2, 2}, true}; }

  static void validate(std::size_t channels, std::size_t reduction) {
    require(reduction > 0 && channels > 0 && channels % reduction == 0, ErrorKind::InvalidConfig,
            "mass attention needs channels divisible by the reduction factor (C=", channels, ", r=", reduction, ")");
  }

  static MassAttWeights create(ParameterList& params, const std::string& prefix, std::size_t channels, Rng& rng,
                               std::size_t reduction = 4) {
    validate(channels, reduction);
    MassAttWeights w;
    w.channels = channels;
    w.reduction = reduction;
    const std::size_t hid = channels / reduction;
    w.z0 = params.add(prefix + ".Z0", {hid, channels});
    w.b0 = params.add(prefix + ".b0", {hid});
    w.z1 = params.add(prefix + ".Z1", {channels, hid});
    w.b1 = params.add(prefix + ".b1", {channels});
    w.z2 = params.add(prefix + ".Z2", z2_spec().weight_shape());
    w.b2 = params.add(prefix + ".b2", {2});
    w.z3 = params.add(prefix + ".Z3", z3_spec().weight_shape());
    w.b3 = params.add(prefix + ".b3", {4});
    w.z4 = params.add(prefix + ".Z4", z4_spec().weight_shape());
    w.b4 = params.add(prefix + ".b4", {4});
    w.z5 = params.add(prefix + ".Z5", z5_spec().weight_shape());
    w.b5 = params.add(prefix + ".b5", {1});
    nn::he_uniform(w.z0, channels, rng);
    nn::he_uniform(w.z1, hid, rng);
    nn::he_uniform(w.z2, z2_spec().fan_in(), rng);
    nn::he_uniform(w.z3, z3_spec().fan_in(), rng);
    nn::he_uniform(w.z4, z4_spec().fan_in(), rng);
    nn::he_uniform(w.z5, z5_spec().fan_in(), rng);
    return w;
  }

  std::size_t channel_path_count() const { return 2 * channels * hidden() + hidden() + channels; }
  static std::size_t spatial_path_count() {
    return z2_spec().parameter_count() + z3_spec().parameter_count() + z4_spec().parameter_count() +
           z5_spec().parameter_count();
  }
};

/// Intermediate maps of one mass-attention evaluation.
struct MassAttTrace {
  Tensor channel_descriptor;  // D_c (N,C)
  Tensor channel_map;         // A_c (N,C)
  Tensor spatial_descriptor;  // D_s (N,1,H,W)
  Tensor spatial_map;         // A_s (N,1,H,W)
  Tensor attention;           // A_m (N,C,H,W)
};

/// A_m = sigmoid(A_c ⊗ A_s) with
///   A_c = Z1 relu(Z0 D_c),  D_c = per-channel spatial mean
///   A_s = Z5 ⊛ relu(Z4 ⊛ relu(Z3 ⊛ relu(Z2 ⊛ D_s))),  D_s = per-pixel channel mean
/// The two stride-2 convolutions are undone by two stride-2 transposed
/// convolutions sized to the recorded pre-reduction extents.
inline MassAttTrace mass_att_trace(Tensor x, const MassAttWeights& w) {
  require(x.rank() == 4, ErrorKind::ShapeMismatch, "mass_att needs NCHW, got ", shape_str(x.shape()));
  require(x.dim(1) == w.channels, ErrorKind::ShapeMismatch, "mass_att: input has ", x.dim(1),
          " channels, weights built for ", w.channels);
  MassAttWeights::validate(x.dim(1), w.reduction);
  require(x.dim(2) % 4 == 0 && x.dim(3) % 4 == 0 && x.dim(2) > 0 && x.dim(3) > 0, ErrorKind::ShapeMismatch,
          "mass_att needs spatial extents divisible by 4, got ", x.dim(2), "x", x.dim(3));
  MassAttTrace t;
  t.channel_descriptor = nn::global_avg_pool(x);
  t.channel_map = nn::dense(nn::relu(nn::dense(t.channel_descriptor, w.z0, w.b0)), w.z1, w.b1);

  t.spatial_descriptor = channel_mean(x);
  Tensor s1 = nn::relu(nn::conv2d(t.spatial_descriptor, MassAttWeights::z2_spec(), w.z2, w.b2));
  Tensor s2 = nn::relu(nn::conv2d(s1, MassAttWeights::z3_spec(), w.z3, w.b3));
  Tensor s3 = nn::relu(nn::transposed_conv2d(s2, MassAttWeights::z4_spec(), w.z4, w.b4, s1.dim(2), s1.dim(3)));
  t.spatial_map = nn::transposed_conv2d(s3, MassAttWeights::z5_spec(), w.z5, w.b5, x.dim(2), x.dim(3));

  t.attention = nn::sigmoid(outer_channel_spatial(t.channel_map, t.spatial_map));
  return t;
}

inline Tensor mass_att(Tensor x, const MassAttWeights& w) { return mass_att_trace(std::move(x), w).attention; }

}  // namespace lanmsff::blocks
