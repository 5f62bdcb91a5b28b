#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lanmsff/tensor.hpp"

namespace lanmsff::nn {

inline Tensor relu(Tensor x) {
  return record(
      "relu", {x},
      [&] {
        Tensor y(x.shape());
        const bool monitor = kink_monitoring();
        for (std::size_t i = 0; i < x.numel(); ++i) {
          y[i] = x[i] > real(0) ? x[i] : real(0);
          if (monitor) note_kink(x[i] > real(0) ? (i << 1) | 1 : (i << 1));
        }
        return y;
      },
      [x](std::span<const real> g) mutable {
        auto gx = grad_target(x);
        for (std::size_t i = 0; i < gx.size(); ++i)
          if (x[i] > real(0)) gx[i] += g[i];
      });
}

/// Logistic sigmoid. Output is clamped to the open interval (0,1) so that
/// saturated inputs never produce exactly 0 or 1.
inline real sigmoid_value(real z) {
  constexpr real lo = std::numeric_limits<real>::min();
  constexpr real hi = real(1) - std::numeric_limits<real>::epsilon() / 2;
  real s;
  if (z >= 0) {
    s = real(1) / (real(1) + std::exp(-z));
  } else {
    const real e = std::exp(z);
    s = e / (real(1) + e);
  }
  return std::clamp(s, lo, hi);
}

inline Tensor sigmoid(Tensor x) {
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) y[i] = sigmoid_value(x[i]);
  return record_node("sigmoid", {x}, y, [x, y](std::span<const real> g) mutable {
    auto gx = grad_target(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i] * y[i] * (real(1) - y[i]);
  });
}

/// Max-shifted softmax of one logit vector.
inline std::vector<real> softmax(std::span<const real> z) {
  std::vector<real> p(z.size());
  if (z.empty()) return p;
  real m = z[0];
  for (real v : z) m = std::max(m, v);
  real denom = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - m);
    denom += p[i];
  }
  for (auto& v : p) v /= denom;
  return p;
}

/// Row-wise softmax of (N,K) logits, differentiable.
inline Tensor softmax_rows(Tensor logits) {
  require(logits.rank() == 2, ErrorKind::ShapeMismatch, "softmax_rows needs (N,K), got ", shape_str(logits.shape()));
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  Tensor p(logits.shape());
  for (std::size_t b = 0; b < n; ++b) {
    auto row = softmax(logits.data().subspan(b * k, k));
    std::copy(row.begin(), row.end(), p.ptr() + b * k);
  }
  return record_node("softmax", {logits}, p, [logits, p, n, k](std::span<const real> g) mutable {
    auto gz = grad_target(logits);
    if (gz.empty()) return;
    for (std::size_t b = 0; b < n; ++b) {
      real dotp = 0;
      for (std::size_t j = 0; j < k; ++j) dotp += g[b * k + j] * p[b * k + j];
      for (std::size_t j = 0; j < k; ++j) gz[b * k + j] += p[b * k + j] * (g[b * k + j] - dotp);
    }
  });
}

}  // namespace lanmsff::nn
