#pragma once

#include <vector>

#include "lanmsff/tensor.hpp"

namespace lanmsff::nn {

/// 2×2 max pooling with stride 2. Ties go to the first element in
/// row-major window order, which also receives the whole gradient.
inline Tensor maxpool2x2(Tensor x) {
  require(x.rank() == 4, ErrorKind::ShapeMismatch, "maxpool2x2 needs NCHW, got ", shape_str(x.shape()));
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  require(h % 2 == 0 && w % 2 == 0 && h > 0 && w > 0, ErrorKind::ShapeMismatch,
          "maxpool2x2 needs even spatial extents, got ", h, "x", w);
  const std::size_t ho = h / 2, wo = w / 2;
  Tensor y({n, c, ho, wo});
  std::vector<std::size_t> argmax(y.numel());
  const bool monitor = kink_monitoring();
  for (std::size_t nc = 0; nc < n * c; ++nc) {
    const real* plane = x.ptr() + nc * h * w;
    for (std::size_t i = 0; i < ho; ++i)
      for (std::size_t j = 0; j < wo; ++j) {
        const std::size_t cand[4] = {(2 * i) * w + 2 * j, (2 * i) * w + 2 * j + 1, (2 * i + 1) * w + 2 * j,
                                     (2 * i + 1) * w + 2 * j + 1};
        std::size_t best = 0;
        for (std::size_t k = 1; k < 4; ++k)
          if (plane[cand[k]] > plane[cand[best]]) best = k;
        const std::size_t o = (nc * ho + i) * wo + j;
        y[o] = plane[cand[best]];
        argmax[o] = nc * h * w + cand[best];
        if (monitor) note_kink(o * 4 + best);
      }
  }
  return record_node("maxpool2x2", {x}, y, [x, argmax = std::move(argmax)](std::span<const real> g) mutable {
    auto gx = grad_target(x);
    if (gx.empty()) return;
    for (std::size_t o = 0; o < argmax.size(); ++o) gx[argmax[o]] += g[o];
  });
}

/// (N,C,H,W) -> (N,C): mean over each spatial plane.
inline Tensor global_avg_pool(Tensor x) {
  require(x.rank() == 4 && x.dim(2) > 0 && x.dim(3) > 0, ErrorKind::ShapeMismatch,
          "global_avg_pool needs NCHW with H,W >= 1, got ", shape_str(x.shape()));
  const std::size_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  Tensor y({n, c});
  for (std::size_t nc = 0; nc < n * c; ++nc) {
    real acc = 0;
    const real* p = x.ptr() + nc * hw;
    for (std::size_t i = 0; i < hw; ++i) acc += p[i];
    y[nc] = acc / static_cast<real>(hw);
  }
  return record_node("global_avg_pool", {x}, y, [x, n, c, hw](std::span<const real> g) mutable {
    auto gx = grad_target(x);
    if (gx.empty()) return;
    const real inv = real(1) / static_cast<real>(hw);
    for (std::size_t nc = 0; nc < n * c; ++nc)
      for (std::size_t i = 0; i < hw; ++i) gx[nc * hw + i] += g[nc] * inv;
  });
}

}  // namespace lanmsff::nn
