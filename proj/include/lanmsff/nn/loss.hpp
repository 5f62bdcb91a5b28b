#pragma once

#include <cmath>
#include <vector>

#include "lanmsff/nn/activation.hpp"

namespace lanmsff::nn {

/// Mean categorical cross-entropy of (N,K) logits against integer labels,
/// via log-sum-exp. d loss / d logits = (softmax - one_hot) / N.
inline Tensor softmax_cross_entropy(Tensor logits, const std::vector<int>& labels) {
  require(logits.rank() == 2 && logits.dim(0) == labels.size(), ErrorKind::ShapeMismatch,
          "softmax_cross_entropy: logits ", shape_str(logits.shape()), " vs ", labels.size(), " labels");
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  for (std::size_t b = 0; b < n; ++b)
    require(labels[b] >= 0 && static_cast<std::size_t>(labels[b]) < k, ErrorKind::InvalidArgument, "label ",
            labels[b], " out of range for ", k, " classes");
  std::vector<real> probs(n * k);
  real total = 0;
  for (std::size_t b = 0; b < n; ++b) {
    const real* z = logits.ptr() + b * k;
    real m = z[0];
    for (std::size_t j = 1; j < k; ++j) m = std::max(m, z[j]);
    real s = 0;
    for (std::size_t j = 0; j < k; ++j) s += std::exp(z[j] - m);
    const real lse = m + std::log(s);
    total += lse - z[labels[b]];
    for (std::size_t j = 0; j < k; ++j) probs[b * k + j] = std::exp(z[j] - lse);
  }
  Tensor loss = Tensor::scalar(total / static_cast<real>(n));
  return record_node("softmax_cross_entropy", {logits}, loss,
                     [logits, probs = std::move(probs), labels, n, k](std::span<const real> g) mutable {
                       auto gz = grad_target(logits);
                       if (gz.empty()) return;
                       const real s = g[0] / static_cast<real>(n);
                       for (std::size_t b = 0; b < n; ++b)
                         for (std::size_t j = 0; j < k; ++j) {
                           const real onehot = static_cast<int>(j) == labels[b] ? real(1) : real(0);
                           gz[b * k + j] += s * (probs[b * k + j] - onehot);
                         }
                     });
}

/// Mean of -log p[true] from probability rows and one-hot label rows.
inline real cross_entropy(std::span<const real> probabilities, std::span<const real> one_hot, std::size_t classes) {
  require(classes > 0 && probabilities.size() == one_hot.size() && probabilities.size() % classes == 0,
          ErrorKind::ShapeMismatch, "cross_entropy: ", probabilities.size(), " probabilities vs ", one_hot.size(),
          " labels for ", classes, " classes");
  const std::size_t n = probabilities.size() / classes;
  require(n > 0, ErrorKind::InvalidArgument, "cross_entropy of an empty batch");
  real total = 0;
  for (std::size_t b = 0; b < n; ++b) {
    real mass = 0;
    for (std::size_t j = 0; j < classes; ++j) mass += one_hot[b * classes + j];
    require(mass > 0, ErrorKind::InvalidArgument, "label row ", b, " is all zero");
    for (std::size_t j = 0; j < classes; ++j) {
      const real y = one_hot[b * classes + j];
      if (y != 0) total -= y * std::log(probabilities[b * classes + j]);
    }
  }
  return total / static_cast<real>(n);
}

}  // namespace lanmsff::nn
