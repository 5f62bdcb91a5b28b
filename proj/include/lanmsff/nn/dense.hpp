#pragma once

#include "lanmsff/gemm.hpp"
#include "lanmsff/tensor.hpp"

namespace lanmsff::nn {

/// y = x W^T + b with x (N,in), W (out,in), b (out).
inline Tensor dense(Tensor x, Tensor weight, Tensor bias = {}) {
  require(x.rank() == 2 && weight.rank() == 2 && x.dim(1) == weight.dim(1), ErrorKind::ShapeMismatch,
          "dense: input ", shape_str(x.shape()), " vs weight ", shape_str(weight.shape()));
  const std::size_t n = x.dim(0), in = x.dim(1), out = weight.dim(0);
  if (bias.defined())
    require(bias.shape() == Shape{out}, ErrorKind::ShapeMismatch, "dense: bias ", shape_str(bias.shape()),
            ", expected (", out, ")");
  Tensor y({n, out});
  gemm::nt(n, out, in, x.ptr(), in, weight.ptr(), in, y.ptr(), out);
  if (bias.defined())
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t o = 0; o < out; ++o) y[b * out + o] += bias[o];
  std::vector<Tensor> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  return record_node("dense", std::move(inputs), y, [x, weight, bias, n, in, out](std::span<const real> g) mutable {
    auto gx = grad_target(x);
    if (!gx.empty()) gemm::nn(n, in, out, g.data(), out, weight.ptr(), in, gx.data(), in);
    auto gw = grad_target(weight);
    if (!gw.empty()) gemm::tn(out, in, n, g.data(), out, x.ptr(), in, gw.data(), in);
    if (bias.defined()) {
      auto gb = grad_target(bias);
      for (std::size_t b = 0; b < n && !gb.empty(); ++b)
        for (std::size_t o = 0; o < out; ++o) gb[o] += g[b * out + o];
    }
  });
}

}  // namespace lanmsff::nn
