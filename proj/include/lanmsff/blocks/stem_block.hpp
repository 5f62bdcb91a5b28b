#pragma once

#include <string>

#include "lanmsff/nn/activation.hpp"
#include "lanmsff/nn/conv.hpp"
#include "lanmsff/nn/dropout.hpp"
#include "lanmsff/nn/init.hpp"
#include "lanmsff/nn/norm.hpp"
#include "lanmsff/nn/pool.hpp"

namespace lanmsff::blocks {

/// Output of a block: the pooled, dropped-out result and the feature map
/// just before max pooling (Grad-CAM tap).
struct BlockOutput {
  Tensor out;
  Tensor pre_pool;
};

struct StemBlockConfig {
  std::size_t in_channels = 1;
  std::size_t width = 66;
  real dropout_rate = real(0.25);
  nn::BatchNormOptions bn;
};

/// Blocks 1 and 3: conv3×3 → DWS conv → conv3×3 → BN → ReLU → maxpool → dropout.
struct StemBlock {
  StemBlockConfig cfg;
  nn::ConvSpec conv1_spec;
  Tensor conv1_w, conv1_b;
  nn::DwsSpec dws_spec;
  nn::DwsWeights dws;
  nn::ConvSpec conv3_spec;
  Tensor conv3_w;
  nn::BatchNorm bn;

  static StemBlock create(const StemBlockConfig& cfg, ParameterList& params, const std::string& prefix, Rng& rng) {
    require(cfg.in_channels > 0 && cfg.width > 0, ErrorKind::InvalidConfig, prefix,
            ": stem block needs positive channel counts");
    StemBlock b;
    b.cfg = cfg;
    b.conv1_spec.in_channels = cfg.in_channels;
    b.conv1_spec.out_channels = cfg.width;
    b.conv1_spec.bias = true;
    b.conv1_w = params.add(prefix + ".conv1.weight", b.conv1_spec.weight_shape());
    b.conv1_b = params.add(prefix + ".conv1.bias", {cfg.width});
    nn::he_uniform(b.conv1_w, b.conv1_spec.fan_in(), rng);

    b.dws_spec.in_channels = b.dws_spec.out_channels = cfg.width;
    b.dws.depthwise = params.add(prefix + ".dws.depthwise.weight", b.dws_spec.depthwise().weight_shape());
    b.dws.pointwise = params.add(prefix + ".dws.pointwise.weight", b.dws_spec.pointwise().weight_shape());
    b.dws.pointwise_bias = params.add(prefix + ".dws.pointwise.bias", {cfg.width});
    nn::he_uniform(b.dws.depthwise, b.dws_spec.depthwise().fan_in(), rng);
    nn::he_uniform(b.dws.pointwise, b.dws_spec.pointwise().fan_in(), rng);

    // Feeds BatchNorm directly, so no bias.
    b.conv3_spec.in_channels = b.conv3_spec.out_channels = cfg.width;
    b.conv3_spec.bias = false;
    b.conv3_w = params.add(prefix + ".conv3.weight", b.conv3_spec.weight_shape());
    nn::he_uniform(b.conv3_w, b.conv3_spec.fan_in(), rng);

    b.bn = nn::make_batch_norm<nn::BatchNorm>(params, prefix + ".bn", cfg.width);
    b.bn.options = cfg.bn;
    return b;
  }
};

inline BlockOutput stem_block(Tensor x, StemBlock& blk, nn::Mode mode, std::uint64_t dropout_seed) {
  require(x.rank() == 4 && x.dim(2) % 2 == 0 && x.dim(3) % 2 == 0, ErrorKind::ShapeMismatch,
          "stem block needs NCHW input with even spatial extents, got ", shape_str(x.shape()));
  Tensor h = nn::relu(nn::conv2d(std::move(x), blk.conv1_spec, blk.conv1_w, blk.conv1_b));
  h = nn::relu(nn::dws_conv(std::move(h), blk.dws_spec, blk.dws));
  h = nn::conv2d(std::move(h), blk.conv3_spec, blk.conv3_w);
  h = nn::relu(nn::batch_norm(std::move(h), blk.bn, mode));
  BlockOutput out;
  out.pre_pool = h;
  out.out = nn::dropout(nn::maxpool2x2(h), {blk.cfg.dropout_rate, dropout_seed}, mode);
  return out;
}

}  // namespace lanmsff::blocks
