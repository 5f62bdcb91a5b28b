#pragma once

#include <cmath>
#include <vector>

#include "lanmsff/tensor.hpp"

namespace lanmsff::train {

struct AdamOptions {
  real beta1 = real(0.9);
  real beta2 = real(0.999);
  real epsilon = real(1e-8);
};

/// First and second moments per trainable parameter, in list order.
struct AdamState {
  std::vector<std::vector<real>> m, v;
  std::uint64_t t = 0;

  static AdamState for_parameters(const ParameterList& params) {
    AdamState s;
    for (const auto& p : params) {
      const std::size_t n = p.trainable ? p.value.numel() : 0;
      s.m.emplace_back(n, real(0));
      s.v.emplace_back(n, real(0));
    }
    return s;
  }
};

/// One bias-corrected Adam update from the gradients accumulated on each
/// trainable parameter. A non-finite gradient aborts the step before any
/// parameter or moment is touched.
inline void adam_step(ParameterList& params, AdamState& state, real lr, const AdamOptions& opt = {}) {
  require(state.m.size() == params.size(), ErrorKind::InvalidArgument, "Adam state tracks ", state.m.size(),
          " parameters, list has ", params.size());
  for (const auto& p : params) {
    if (!p.trainable || !p.value.has_grad()) continue;
    for (real g : p.value.grad())
      require(std::isfinite(g), ErrorKind::Numeric, "non-finite gradient in parameter '", p.name, "'; step aborted");
  }
  state.t += 1;
  const real c1 = real(1) - std::pow(opt.beta1, static_cast<real>(state.t));
  const real c2 = real(1) - std::pow(opt.beta2, static_cast<real>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    if (!p.trainable || !p.value.has_grad()) continue;
    auto g = p.value.grad();
    auto w = p.value.data();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = opt.beta1 * m[j] + (1 - opt.beta1) * g[j];
      v[j] = opt.beta2 * v[j] + (1 - opt.beta2) * g[j] * g[j];
      const real mh = m[j] / c1, vh = v[j] / c2;
      w[j] -= lr * mh / (std::sqrt(vh) + opt.epsilon);
    }
  }
}

}  // namespace lanmsff::train
