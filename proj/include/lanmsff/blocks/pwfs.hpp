#pragma once

#include <array>
#include <vector>

#include "lanmsff/tensor.hpp"

namespace lanmsff::blocks {

/// Channel partition used by point-wise feature selection: sub-group k
/// holds channels [k*C/3, (k+1)*C/3).
struct PwfsGrouping {
  std::size_t in_channels = 0;

  explicit PwfsGrouping(std::size_t c) : in_channels(c) {
    require(c > 0 && c % 3 == 0, ErrorKind::ShapeMismatch, "pwfs needs a channel count divisible by 3, got C=", c);
  }
  std::size_t out_channels() const { return in_channels / 3; }
  std::size_t group_begin(std::size_t k) const { return k * out_channels(); }
};

/// Ranks three values descending; ties keep sub-group order S0 < S1 < S2.
/// Returns the sub-group indices of (max, median, min).
inline std::array<std::size_t, 3> pwfs_rank(real a, real b, real c) {
  std::array<std::size_t, 3> idx{0, 1, 2};
  const real v[3] = {a, b, c};
  // Insertion sort on three elements, strict comparison keeps ties stable.
  for (std::size_t i = 1; i < 3; ++i)
    for (std::size_t j = i; j > 0 && v[idx[j]] > v[idx[j - 1]]; --j) std::swap(idx[j], idx[j - 1]);
  return idx;
}

/// Point-wise feature selection: splits C channels into three equal
/// sub-groups and keeps, at every (c,h,w), the mean of the maximum and the
/// median of the three aligned values. (N,C,...) -> (N,C/3,...).
/// Backward routes half of the incoming gradient to each selected element.
inline Tensor pwfs(Tensor x) {
  require(x.rank() >= 2, ErrorKind::ShapeMismatch, "pwfs needs rank >= 2, got ", shape_str(x.shape()));
  const PwfsGrouping grouping(x.dim(1));
  const std::size_t n = x.dim(0), c = x.dim(1), oc = grouping.out_channels();
  std::size_t inner = 1;
  for (std::size_t i = 2; i < x.rank(); ++i) inner *= x.dim(i);
  Shape out_shape = x.shape();
  out_shape[1] = oc;
  Tensor y(out_shape);
  // Per output element, the two selected source offsets.
  std::vector<std::array<std::size_t, 2>> selected(y.numel());
  const bool monitor = kink_monitoring();
  const std::size_t stride = oc * inner;
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t j = 0; j < stride; ++j) {
      const std::size_t base = b * c * inner + j;
      const std::size_t off[3] = {base, base + stride, base + 2 * stride};
      const auto r = pwfs_rank(x[off[0]], x[off[1]], x[off[2]]);
      const std::size_t o = b * stride + j;
      y[o] = real(0.5) * (x[off[r[0]]] + x[off[r[1]]]);
      selected[o] = {off[r[0]], off[r[1]]};
      if (monitor) note_kink(o * 3 + r[2]);
    }
  return record_node("pwfs", {x}, y, [x, selected = std::move(selected)](std::span<const real> g) mutable {
    auto gx = grad_target(x);
    if (gx.empty()) return;
    for (std::size_t o = 0; o < selected.size(); ++o) {
      gx[selected[o][0]] += real(0.5) * g[o];
      gx[selected[o][1]] += real(0.5) * g[o];
    }
  });
}

}  // namespace lanmsff::blocks
