#pragma once

#include <array>
#include <optional>
#include <string>

#include "lanmsff/blocks/mass_att.hpp"
#include "lanmsff/blocks/stem_block.hpp"
#include "lanmsff/nn/shuffle.hpp"

namespace lanmsff::blocks {

/// How the two convolution paths exchange features between stages.
enum class PathWiring {
  /// After every stage both path outputs are concatenated and the
  /// concatenation feeds both paths' next stage.
  CrossPathSharing,
  /// Each path only consumes its own previous stage; the paths meet at the
  /// final concatenation.
  Independent,
};

struct DualPathBlockConfig {
  std::size_t in_channels = 66;
  std::size_t width = 72;
  real dropout_rate = real(0.25);
  bool enable_massatt = true;
  std::size_t mass_att_reduction = 4;
  PathWiring wiring = PathWiring::CrossPathSharing;
  nn::BatchNormOptions bn;

  void validate(const std::string& name) const {
    require(in_channels > 0 && in_channels % 2 == 0, ErrorKind::InvalidConfig, name,
            ": dual-path block input channels must be even for shuffle-split, got ", in_channels);
    require(width > 0 && width % 2 == 0, ErrorKind::InvalidConfig, name,
            ": dual-path block width must be even, got ", width);
    if (enable_massatt)
      require(width % mass_att_reduction == 0, ErrorKind::InvalidConfig, name, ": width ", width,
              " not divisible by the attention reduction factor ", mass_att_reduction);
  }
};

/// One convolution path: 3×3 conv → DWS conv → 3×3 conv, each followed by
/// ReLU. Path A is undilated, path B uses dilation 2 throughout.
struct ConvPath {
  nn::ConvSpec stage1;
  Tensor stage1_w;
  nn::DwsSpec stage2;
  nn::DwsWeights stage2_w;
  nn::ConvSpec stage3;
  Tensor stage3_w;
};

/// Blocks 2 and 4: shuffle-split → two parallel dilation-1 / dilation-2
/// paths → concat → mass attention → multiply → 1×1 conv → BN → ReLU →
/// maxpool → dropout.
struct DualPathBlock {
  DualPathBlockConfig cfg;
  std::array<ConvPath, 2> paths;
  std::optional<MassAttWeights> attention;
  nn::ConvSpec fuse_spec;
  Tensor fuse_w;
  nn::BatchNorm bn;

  static DualPathBlock create(const DualPathBlockConfig& cfg, ParameterList& params, const std::string& prefix,
                              Rng& rng) {
    cfg.validate(prefix);
    DualPathBlock b;
    b.cfg = cfg;
    const std::size_t half = cfg.width / 2;
    const std::size_t later_in = cfg.wiring == PathWiring::CrossPathSharing ? cfg.width : half;
    for (std::size_t p = 0; p < 2; ++p) {
      const std::string name = prefix + (p == 0 ? ".pathA" : ".pathB");
      const std::size_t dil = p == 0 ? 1 : 2;
      ConvPath& path = b.paths[p];
      path.stage1.in_channels = cfg.in_channels / 2;
      path.stage1.out_channels = half;
      path.stage1.dilation = {dil, dil};
      path.stage1.bias = false;
      path.stage1_w = params.add(name + ".conv1.weight", path.stage1.weight_shape());
      nn::he_uniform(path.stage1_w, path.stage1.fan_in(), rng);

      path.stage2.in_channels = later_in;
      path.stage2.out_channels = half;
      path.stage2.dilation = {dil, dil};
      path.stage2.pointwise_bias = false;
      path.stage2_w.depthwise = params.add(name + ".dws.depthwise.weight", path.stage2.depthwise().weight_shape());
      path.stage2_w.pointwise = params.add(name + ".dws.pointwise.weight", path.stage2.pointwise().weight_shape());
      nn::he_uniform(path.stage2_w.depthwise, path.stage2.depthwise().fan_in(), rng);
      nn::he_uniform(path.stage2_w.pointwise, path.stage2.pointwise().fan_in(), rng);

      path.stage3.in_channels = later_in;
      path.stage3.out_channels = half;
      path.stage3.dilation = {dil, dil};
      path.stage3.bias = false;
      path.stage3_w = params.add(name + ".conv3.weight", path.stage3.weight_shape());
      nn::he_uniform(path.stage3_w, path.stage3.fan_in(), rng);
    }
    if (cfg.enable_massatt)
      b.attention = MassAttWeights::create(params, prefix + ".massatt", cfg.width, rng, cfg.mass_att_reduction);

    b.fuse_spec.in_channels = b.fuse_spec.out_channels = cfg.width;
    b.fuse_spec.kernel = {1, 1};
    b.fuse_spec.bias = false;
    b.fuse_w = params.add(prefix + ".conv1x1.weight", b.fuse_spec.weight_shape());
    nn::he_uniform(b.fuse_w, b.fuse_spec.fan_in(), rng);

    b.bn = nn::make_batch_norm<nn::BatchNorm>(params, prefix + ".bn", cfg.width);
    b.bn.options = cfg.bn;
    return b;
  }
};

inline BlockOutput dual_path_block(Tensor x, DualPathBlock& blk, nn::Mode mode, std::uint64_t dropout_seed) {
  require(x.rank() == 4, ErrorKind::ShapeMismatch, "dual-path block needs NCHW input, got ", shape_str(x.shape()));
  require(x.dim(1) == blk.cfg.in_channels, ErrorKind::ShapeMismatch, "dual-path block expects ", blk.cfg.in_channels,
          " input channels, got ", x.dim(1));
  require(x.dim(2) % 4 == 0 && x.dim(3) % 4 == 0, ErrorKind::ShapeMismatch,
          "dual-path block needs spatial extents divisible by 4, got ", x.dim(2), "x", x.dim(3));
  auto [a, b] = nn::channel_shuffle_split(std::move(x));
  ConvPath& pa = blk.paths[0];
  ConvPath& pb = blk.paths[1];
  const bool share = blk.cfg.wiring == PathWiring::CrossPathSharing;

  Tensor a1 = nn::relu(nn::conv2d(a, pa.stage1, pa.stage1_w));
  Tensor b1 = nn::relu(nn::conv2d(b, pb.stage1, pb.stage1_w));
  Tensor cat1 = share ? concat_channels({a1, b1}) : Tensor{};

  Tensor a2 = nn::relu(nn::dws_conv(share ? cat1 : a1, pa.stage2, pa.stage2_w));
  Tensor b2 = nn::relu(nn::dws_conv(share ? cat1 : b1, pb.stage2, pb.stage2_w));
  Tensor cat2 = share ? concat_channels({a2, b2}) : Tensor{};

  Tensor a3 = nn::relu(nn::conv2d(share ? cat2 : a2, pa.stage3, pa.stage3_w));
  Tensor b3 = nn::relu(nn::conv2d(share ? cat2 : b2, pb.stage3, pb.stage3_w));
  Tensor features = concat_channels({a3, b3});

  if (blk.attention) features = mul(features, mass_att(features, *blk.attention));

  Tensor h = nn::conv2d(std::move(features), blk.fuse_spec, blk.fuse_w);
  h = nn::relu(nn::batch_norm(std::move(h), blk.bn, mode));
  BlockOutput out;
  out.pre_pool = h;
  out.out = nn::dropout(nn::maxpool2x2(h), {blk.cfg.dropout_rate, dropout_seed}, mode);
  return out;
}

}  // namespace lanmsff::blocks
