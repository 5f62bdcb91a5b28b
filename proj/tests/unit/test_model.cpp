#include <gtest/gtest.h>

#include <cmath>

#include "lanmsff/model/audit.hpp"
#include "lanmsff/model/serialize.hpp"
#include "lanmsff/nn/loss.hpp"
#include "oracles.hpp"

using namespace lanmsff;
using model::LanmsffConfig;
using model::LanmsffModel;

namespace {

ErrorKind decode_error(std::span<const unsigned char> bytes, const LanmsffConfig& cfg) {
  try {
    model::decode_weights(bytes, cfg);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "decode succeeded";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Config, FusionLength) {
  LanmsffConfig c;
  EXPECT_EQ(c.fusion_length(), 156u);
  c.enable_pwfs = false;
  EXPECT_EQ(c.fusion_length(), 300u);
}

TEST(Config, RejectsIndivisibleWidths) {
  LanmsffConfig c;
  c.block_widths = {64, 72, 78, 84};
  EXPECT_THROW(c.validate(), Error);
  c.enable_pwfs = false;
  EXPECT_NO_THROW(c.validate());
  c.input_size = 48;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Config, JsonRoundTrip) {
  LanmsffConfig c;
  c.enable_massatt = false;
  c.num_classes = 8;
  c.wiring = blocks::PathWiring::Independent;
  EXPECT_EQ(model::config_from_json(model::to_json(c)).architecture_key(), c.architecture_key());
}

TEST(Model, BlockTraceAndClassifierShape) {
  auto m = LanmsffModel::build(LanmsffConfig{}, 1);
  auto r = m.forward(Tensor({2, 1, 64, 64}));
  EXPECT_EQ(r.blocks[0].shape(), (Shape{2, 66, 32, 32}));
  EXPECT_EQ(r.blocks[1].shape(), (Shape{2, 72, 16, 16}));
  EXPECT_EQ(r.blocks[2].shape(), (Shape{2, 78, 8, 8}));
  EXPECT_EQ(r.blocks[3].shape(), (Shape{2, 84, 4, 4}));
  EXPECT_EQ(r.fused.shape(), (Shape{2, 156}));
  EXPECT_EQ(r.logits.shape(), (Shape{2, 7}));
  const auto& w = m.parameters().get("classifier.weight").value;
  EXPECT_EQ(w.shape(), (Shape{7, 156}));
  EXPECT_EQ(w.numel() + m.parameters().get("classifier.bias").value.numel(), 1099u);
}

TEST(Model, RejectsWrongInputShape) {
  auto m = LanmsffModel::build(LanmsffConfig::miniature(), 1);
  EXPECT_THROW(m.logits(Tensor({1, 1, 64, 64})), Error);
}

TEST(Model, SameSeedSameWeightsAndEvalIsDeterministic) {
  auto a = LanmsffModel::build(LanmsffConfig::miniature(), 5);
  auto b = LanmsffModel::build(LanmsffConfig::miniature(), 5);
  auto c = LanmsffModel::build(LanmsffConfig::miniature(), 6);
  EXPECT_EQ(a.snapshot(), b.snapshot());
  EXPECT_NE(a.snapshot(), c.snapshot());
  Rng rng(1);
  Tensor x = oracle::random_tensor({3, 1, 32, 32}, rng, 0, 1);
  Tensor la = a.logits(x), lb = a.logits(x);
  for (std::size_t i = 0; i < la.numel(); ++i) EXPECT_EQ(la[i], lb[i]);
}

TEST(Model, CloneIsIndependent) {
  auto a = LanmsffModel::build(LanmsffConfig::miniature(), 5);
  auto b = a.clone();
  EXPECT_EQ(a.snapshot(), b.snapshot());
  b.parameters()[0].value[0] += 1;
  EXPECT_NE(a.snapshot(), b.snapshot());
}

TEST(Model, GradientStepLowersLoss) {
  auto m = LanmsffModel::build(LanmsffConfig::miniature(), 3);
  Rng rng(2);
  Tensor x = oracle::random_tensor({4, 1, 32, 32}, rng, 0, 1);
  const std::vector<int> labels{0, 1, 2, 1};
  auto loss_of = [&] { return nn::softmax_cross_entropy(m.logits(x), labels); };
  const real before = loss_of().item();
  Tape tape;
  Tensor loss;
  {
    TapeScope scope(tape);
    loss = loss_of();
  }
  tape.backward(loss);
  for (auto& p : m.parameters())
    if (p.trainable && p.value.has_grad())
      for (std::size_t i = 0; i < p.value.numel(); ++i) p.value[i] -= 1e-2 * p.value.grad()[i];
  EXPECT_LT(loss_of().item(), before);
}

TEST(Audit, DefaultTotalMatchesFormulaAndBand) {
  auto m = LanmsffModel::build(LanmsffConfig{});
  auto a = model::audit_parameters(m);
  EXPECT_EQ(a.grand_total, oracle::parameter_count(LanmsffConfig{}));
  EXPECT_EQ(a.grand_total, 354614u);
  EXPECT_EQ(a.fusion_length, 156u);
  EXPECT_TRUE(a.within_band()) << a.relative_deviation();
  EXPECT_EQ(a.massatt_totals.size(), 2u);
  std::size_t sum = 0;
  for (const auto& [_, v] : a.block_totals) sum += v;
  EXPECT_EQ(sum, a.grand_total);
}

TEST(Audit, AblationVariantsMatchFormula) {
  for (bool att : {true, false})
    for (bool pw : {true, false}) {
      LanmsffConfig c;
      c.enable_massatt = att;
      c.enable_pwfs = pw;
      EXPECT_EQ(model::audit_parameters(LanmsffModel::build(c)).grand_total, oracle::parameter_count(c));
    }
}

TEST(Audit, WithoutAttentionDropsExactlyTheAttentionTotals) {
  LanmsffConfig c;
  auto full = model::audit_parameters(LanmsffModel::build(c));
  c.enable_massatt = false;
  auto ablated = model::audit_parameters(LanmsffModel::build(c));
  EXPECT_EQ(full.grand_total - ablated.grand_total, full.massatt_total());
}

TEST(Serialize, RoundTripIsBitExact) {
  const auto cfg = LanmsffConfig::miniature();
  auto m = LanmsffModel::build(cfg, 9);
  auto restored = model::decode_weights(model::encode_weights(m), cfg);
  EXPECT_EQ(restored.snapshot(), m.snapshot());
  Rng rng(3);
  Tensor x = oracle::random_tensor({2, 1, 32, 32}, rng, 0, 1);
  Tensor a = m.logits(x), b = restored.logits(x);
  for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Serialize, SinglePrecisionRoundTripIsClose) {
  const auto cfg = LanmsffConfig::miniature();
  auto m = LanmsffModel::build(cfg, 9);
  auto r = model::decode_weights(model::encode_weights(m, model::ElementType::F32), cfg);
  const auto a = m.snapshot(), b = r.snapshot();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) EXPECT_NEAR(a[i][j], b[i][j], 1e-6);
}

TEST(Serialize, DetectsCorruption) {
  const auto cfg = LanmsffConfig::miniature();
  auto bytes = model::encode_weights(LanmsffModel::build(cfg, 9));
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  EXPECT_EQ(decode_error(flipped, cfg), ErrorKind::ChecksumMismatch);

  auto other = cfg;
  other.num_classes = 4;
  EXPECT_EQ(decode_error(bytes, other), ErrorKind::ConfigHashMismatch);

  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(decode_error(magic, cfg), ErrorKind::BadMagic);

  EXPECT_EQ(decode_error(std::span(bytes).first(bytes.size() - 20), cfg), ErrorKind::Truncated);
}
