#pragma once

#include <cmath>

#include "lanmsff/tensor.hpp"

namespace lanmsff::nn {

/// He-style uniform initialization: U(-b, b) with b = sqrt(6 / fan_in).
inline void he_uniform(Tensor& t, std::size_t fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(std::max<std::size_t>(fan_in, 1)));
  for (auto& v : t.data()) v = static_cast<real>(rng.uniform(-bound, bound));
}

/// Registers gamma/beta (trainable) and running statistics (not trainable)
/// under `prefix`.
template <typename BatchNormT>
BatchNormT make_batch_norm(ParameterList& params, const std::string& prefix, std::size_t channels) {
  BatchNormT bn;
  bn.gamma = params.add(prefix + ".gamma", {channels}, true, real(1));
  bn.beta = params.add(prefix + ".beta", {channels}, true, real(0));
  bn.running_mean = params.add(prefix + ".running_mean", {channels}, false, real(0));
  bn.running_var = params.add(prefix + ".running_var", {channels}, false, real(1));
  return bn;
}

}  // namespace lanmsff::nn
