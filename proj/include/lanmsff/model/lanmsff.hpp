#pragma once

#include <array>
#include <vector>

#include "lanmsff/blocks/dual_path_block.hpp"
#include "lanmsff/blocks/pwfs.hpp"
#include "lanmsff/blocks/stem_block.hpp"
#include "lanmsff/model/config.hpp"
#include "lanmsff/nn/dense.hpp"

namespace lanmsff::model {

struct ForwardOptions {
  nn::Mode mode = nn::Mode::Eval;
  /// Dropout masks are derived from this seed and the block index.
  std::uint64_t dropout_seed = 0;
};

struct ForwardResult {
  Tensor logits;                     // (N, classes)
  std::array<Tensor, 4> blocks;      // block outputs
  Tensor block4_pre_pool;            // (N, w4, S/8, S/8)
  std::array<Tensor, 4> descriptors; // per-scale pooled features before fusion
  Tensor fused;                      // (N, fusion_length)
};

struct BlockShape {
  std::size_t channels, height, width;
  bool operator==(const BlockShape&) const = default;
};

/// Saved parameter values in list order.
using ParameterSnapshot = std::vector<std::vector<real>>;

/// stem(w1) → dual-path(w2) → stem(w3) → dual-path(w4); blocks 1–3 are
/// tapped through PWFS (optional) and GAP, block 4 through GAP; the fused
/// descriptor feeds a dense softmax classifier.
class LanmsffModel {
 public:
  static LanmsffModel build(const LanmsffConfig& config, std::uint64_t seed = 0) {
    config.validate();
    LanmsffModel m;
    m.config_ = config;
    Rng rng(mix_seed(seed, 0x1a2b));
    const auto& w = config.block_widths;
    m.block1_ = blocks::StemBlock::create({config.input_channels, w[0], config.dropout_rate, config.bn}, m.params_,
                                          "block1", rng);
    blocks::DualPathBlockConfig d2{w[0], w[1], config.dropout_rate, config.enable_massatt, config.mass_att_reduction,
                                   config.wiring, config.bn};
    m.block2_ = blocks::DualPathBlock::create(d2, m.params_, "block2", rng);
    m.block3_ = blocks::StemBlock::create({w[1], w[2], config.dropout_rate, config.bn}, m.params_, "block3", rng);
    blocks::DualPathBlockConfig d4{w[2], w[3], config.dropout_rate, config.enable_massatt, config.mass_att_reduction,
                                   config.wiring, config.bn};
    m.block4_ = blocks::DualPathBlock::create(d4, m.params_, "block4", rng);
    const std::size_t fusion = config.fusion_length();
    m.classifier_w_ = m.params_.add("classifier.weight", {config.num_classes, fusion});
    m.classifier_b_ = m.params_.add("classifier.bias", {config.num_classes});
    nn::he_uniform(m.classifier_w_, fusion, rng);
    return m;
  }

  LanmsffModel(LanmsffModel&&) = default;
  LanmsffModel& operator=(LanmsffModel&&) = default;
  LanmsffModel(const LanmsffModel&) = delete;
  LanmsffModel& operator=(const LanmsffModel&) = delete;

  /// Deep copy with independent parameter storage.
  LanmsffModel clone() const {
    LanmsffModel m = build(config_);
    m.restore(snapshot());
    return m;
  }

  const LanmsffConfig& config() const { return config_; }
  ParameterList& parameters() { return params_; }
  const ParameterList& parameters() const { return params_; }

  ParameterSnapshot snapshot() const {
    ParameterSnapshot s;
    s.reserve(params_.size());
    for (const auto& p : params_) s.emplace_back(p.value.data().begin(), p.value.data().end());
    return s;
  }

  void restore(const ParameterSnapshot& s) {
    require(s.size() == params_.size(), ErrorKind::InvalidArgument, "snapshot has ", s.size(),
            " parameters, model has ", params_.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto dst = params_[i].value.data();
      require(dst.size() == s[i].size(), ErrorKind::ShapeMismatch, "snapshot size mismatch for ", params_[i].name);
      std::copy(s[i].begin(), s[i].end(), dst.begin());
    }
  }

  /// Documented (C,H,W) after each block.
  std::array<BlockShape, 4> expected_trace() const {
    std::array<BlockShape, 4> t{};
    for (std::size_t i = 0; i < 4; ++i) {
      const std::size_t e = config_.block_extent(i);
      t[i] = {config_.block_widths[i], e, e};
    }
    return t;
  }

  ForwardResult forward(const Tensor& batch, const ForwardOptions& opt = {}) {
    require(batch.rank() == 4 && batch.dim(1) == config_.input_channels && batch.dim(2) == config_.input_size &&
                batch.dim(3) == config_.input_size,
            ErrorKind::ShapeMismatch, "model expects input (N,", config_.input_channels, ",", config_.input_size, ",",
            config_.input_size, "), got ", shape_str(batch.shape()));
    ForwardResult r;
    const auto trace = expected_trace();
    auto check = [&](std::size_t i, const Tensor& t) {
      const BlockShape got{t.dim(1), t.dim(2), t.dim(3)};
      require(got == trace[i], ErrorKind::ShapeMismatch, "block", i + 1, " output (", got.channels, ",", got.height,
              ",", got.width, ") differs from expected (", trace[i].channels, ",", trace[i].height, ",",
              trace[i].width, ")");
    };
    r.blocks[0] = blocks::stem_block(batch, block1_, opt.mode, mix_seed(opt.dropout_seed, 1)).out;
    check(0, r.blocks[0]);
    r.blocks[1] = blocks::dual_path_block(r.blocks[0], block2_, opt.mode, mix_seed(opt.dropout_seed, 2)).out;
    check(1, r.blocks[1]);
    r.blocks[2] = blocks::stem_block(r.blocks[1], block3_, opt.mode, mix_seed(opt.dropout_seed, 3)).out;
    check(2, r.blocks[2]);
    auto b4 = blocks::dual_path_block(r.blocks[2], block4_, opt.mode, mix_seed(opt.dropout_seed, 4));
    r.blocks[3] = b4.out;
    r.block4_pre_pool = b4.pre_pool;
    check(3, r.blocks[3]);

    for (std::size_t i = 0; i < 3; ++i)
      r.descriptors[i] = nn::global_avg_pool(config_.enable_pwfs ? blocks::pwfs(r.blocks[i]) : r.blocks[i]);
    r.descriptors[3] = nn::global_avg_pool(r.blocks[3]);
    r.fused = concat_channels({r.descriptors[0], r.descriptors[1], r.descriptors[2], r.descriptors[3]});
    r.logits = nn::dense(r.fused, classifier_w_, classifier_b_);
    return r;
  }

  Tensor logits(const Tensor& batch, const ForwardOptions& opt = {}) { return forward(batch, opt).logits; }

  const blocks::StemBlock& block1() const { return block1_; }
  const blocks::DualPathBlock& block2() const { return block2_; }
  const blocks::StemBlock& block3() const { return block3_; }
  const blocks::DualPathBlock& block4() const { return block4_; }

 private:
  LanmsffModel() = default;

  LanmsffConfig config_;
  ParameterList params_;
  blocks::StemBlock block1_;
  blocks::DualPathBlock block2_;
  blocks::StemBlock block3_;
  blocks::DualPathBlock block4_;
  Tensor classifier_w_, classifier_b_;
};

/// Row-wise class probabilities of (N,K) logits.
inline std::vector<std::vector<real>> probabilities(const Tensor& logits) {
  std::vector<std::vector<real>> out;
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  for (std::size_t b = 0; b < n; ++b) out.push_back(nn::softmax(logits.data().subspan(b * k, k)));
  return out;
}

inline std::vector<int> argmax_rows(const Tensor& logits) {
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  std::vector<int> out(n);
  for (std::size_t b = 0; b < n; ++b) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j)
      if (logits[b * k + j] > logits[b * k + best]) best = j;
    out[b] = static_cast<int>(best);
  }
  return out;
}

}  // namespace lanmsff::model
