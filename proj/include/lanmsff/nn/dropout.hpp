#pragma once

#include <vector>

#include "lanmsff/nn/norm.hpp"

namespace lanmsff::nn {

struct DropoutSpec {
  real rate = real(0.25);
  std::uint64_t seed = 0;
};

/// Inverted dropout. Eval mode (or rate 0) returns the input unchanged;
/// train mode keeps each activation with probability 1-rate and scales
/// survivors by 1/(1-rate). The mask is a pure function of the seed.
inline Tensor dropout(Tensor x, const DropoutSpec& spec, Mode mode) {
  require(spec.rate >= 0 && spec.rate < 1, ErrorKind::InvalidArgument, "dropout rate must be in [0,1), got ",
          spec.rate);
  if (mode == Mode::Eval || spec.rate == 0) return x;
  Rng rng(spec.seed);
  const real keep_scale = real(1) / (real(1) - spec.rate);
  std::vector<real> mask(x.numel());
  for (auto& m : mask) m = rng.uniform() >= spec.rate ? keep_scale : real(0);
  Tensor y(x.shape());
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] = x[i] * mask[i];
  return record_node("dropout", {x}, y, [x, mask = std::move(mask)](std::span<const real> g) mutable {
    auto gx = grad_target(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i] * mask[i];
  });
}

}  // namespace lanmsff::nn
