#pragma once

#include <cmath>
#include <vector>

#include "lanmsff/tensor.hpp"

namespace lanmsff::nn {

enum class Mode { Train, Eval };

struct BatchNormOptions {
  real momentum = real(0.9);
  real epsilon = real(1e-5);
};

/// Per-channel batch normalization state. Running statistics are updated
/// in train mode as running = momentum*running + (1-momentum)*batch.
struct BatchNorm {
  Tensor gamma;
  Tensor beta;
  Tensor running_mean;
  Tensor running_var;
  BatchNormOptions options;
};

inline Tensor batch_norm(Tensor x, BatchNorm& bn, Mode mode) {
  require(x.rank() == 4 || x.rank() == 2, ErrorKind::ShapeMismatch, "batch_norm needs (N,C,H,W) or (N,C), got ",
          shape_str(x.shape()));
  const std::size_t n = x.dim(0), c = x.dim(1);
  const std::size_t hw = x.rank() == 4 ? x.dim(2) * x.dim(3) : 1;
  require(bn.gamma.numel() == c && bn.beta.numel() == c && bn.running_mean.numel() == c &&
              bn.running_var.numel() == c,
          ErrorKind::ShapeMismatch, "batch_norm: state sized for ", bn.gamma.numel(), " channels, input has ", c);
  const real eps = bn.options.epsilon;
  const real count = static_cast<real>(n * hw);

  std::vector<real> mean(c), inv_std(c);
  if (mode == Mode::Train) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      real s = 0;
      for (std::size_t b = 0; b < n; ++b) {
        const real* p = x.ptr() + (b * c + ch) * hw;
        for (std::size_t i = 0; i < hw; ++i) s += p[i];
      }
      const real m = s / count;
      real v = 0;
      for (std::size_t b = 0; b < n; ++b) {
        const real* p = x.ptr() + (b * c + ch) * hw;
        for (std::size_t i = 0; i < hw; ++i) v += (p[i] - m) * (p[i] - m);
      }
      v /= count;
      mean[ch] = m;
      inv_std[ch] = real(1) / std::sqrt(v + eps);
      const real mom = bn.options.momentum;
      bn.running_mean[ch] = mom * bn.running_mean[ch] + (real(1) - mom) * m;
      bn.running_var[ch] = mom * bn.running_var[ch] + (real(1) - mom) * v;
    }
  } else {
    for (std::size_t ch = 0; ch < c; ++ch) {
      mean[ch] = bn.running_mean[ch];
      inv_std[ch] = real(1) / std::sqrt(bn.running_var[ch] + eps);
    }
  }

  Tensor xhat(x.shape());
  Tensor y(x.shape());
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t ch = 0; ch < c; ++ch) {
      const std::size_t off = (b * c + ch) * hw;
      for (std::size_t i = 0; i < hw; ++i) {
        const real xh = (x[off + i] - mean[ch]) * inv_std[ch];
        xhat[off + i] = xh;
        y[off + i] = bn.gamma[ch] * xh + bn.beta[ch];
      }
    }

  Tensor gamma = bn.gamma, beta = bn.beta;
  return record_node("batch_norm", {x, gamma, beta}, y,
                     [x, gamma, beta, xhat, inv_std = std::move(inv_std), n, c, hw, count,
                      train = mode == Mode::Train](std::span<const real> g) mutable {
                       auto gx = grad_target(x);
                       auto gg = grad_target(gamma);
                       auto gb = grad_target(beta);
                       for (std::size_t ch = 0; ch < c; ++ch) {
                         real sum_g = 0, sum_gx = 0;
                         for (std::size_t b = 0; b < n; ++b) {
                           const std::size_t off = (b * c + ch) * hw;
                           for (std::size_t i = 0; i < hw; ++i) {
                             sum_g += g[off + i];
                             sum_gx += g[off + i] * xhat[off + i];
                           }
                         }
                         if (!gg.empty()) gg[ch] += sum_gx;
                         if (!gb.empty()) gb[ch] += sum_g;
                         if (gx.empty()) continue;
                         const real k = gamma[ch] * inv_std[ch];
                         for (std::size_t b = 0; b < n; ++b) {
                           const std::size_t off = (b * c + ch) * hw;
                           for (std::size_t i = 0; i < hw; ++i) {
                             if (train)
                               gx[off + i] += k * (g[off + i] - sum_g / count - xhat[off + i] * sum_gx / count);
                             else
                               gx[off + i] += k * g[off + i];
                           }
                         }
                       }
                     });
}

}  // namespace lanmsff::nn
