#pragma once

#include <vector>

#include "lanmsff/tensor.hpp"

// Elementwise, reduction and channel-axis structural ops. Channel-axis ops
// treat the tensor as (N, C, inner...) and work for both (N,C) and NCHW.

namespace lanmsff {

namespace detail {

inline void require_same_shape(std::string_view op, const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), ErrorKind::ShapeMismatch, op, ": ", shape_str(a.shape()), " vs ",
          shape_str(b.shape()));
}

inline std::size_t inner_size(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t i = 2; i < s.size(); ++i) n *= s[i];
  return n;
}

}  // namespace detail

inline Tensor add(Tensor a, Tensor b) {
  detail::require_same_shape("add", a, b);
  return record(
      "add", {a, b},
      [&] {
        Tensor y(a.shape());
        for (std::size_t i = 0; i < y.numel(); ++i) y[i] = a[i] + b[i];
        return y;
      },
      [a, b](std::span<const real> g) mutable {
        for (Tensor* t : {&a, &b}) {
          auto gt = grad_target(*t);
          for (std::size_t i = 0; i < gt.size(); ++i) gt[i] += g[i];
        }
      });
}

inline Tensor sub(Tensor a, Tensor b) {
  detail::require_same_shape("sub", a, b);
  return record(
      "sub", {a, b},
      [&] {
        Tensor y(a.shape());
        for (std::size_t i = 0; i < y.numel(); ++i) y[i] = a[i] - b[i];
        return y;
      },
      [a, b](std::span<const real> g) mutable {
        auto ga = grad_target(a);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
        auto gb = grad_target(b);
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= g[i];
      });
}

inline Tensor mul(Tensor a, Tensor b) {
  detail::require_same_shape("mul", a, b);
  return record(
      "mul", {a, b},
      [&] {
        Tensor y(a.shape());
        for (std::size_t i = 0; i < y.numel(); ++i) y[i] = a[i] * b[i];
        return y;
      },
      [a, b](std::span<const real> g) mutable {
        auto ga = grad_target(a);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * b[i];
        auto gb = grad_target(b);
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[i] * a[i];
      });
}

inline Tensor scale(Tensor a, real s) {
  return record(
      "scale", {a},
      [&] {
        Tensor y(a.shape());
        for (std::size_t i = 0; i < y.numel(); ++i) y[i] = a[i] * s;
        return y;
      },
      [a, s](std::span<const real> g) mutable {
        auto ga = grad_target(a);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * s;
      });
}

inline Tensor sum(Tensor a) {
  return record(
      "sum", {a},
      [&] {
        real acc = 0;
        for (real v : a.data()) acc += v;
        return Tensor::scalar(acc);
      },
      [a](std::span<const real> g) mutable {
        auto ga = grad_target(a);
        for (auto& v : ga) v += g[0];
      });
}

inline Tensor mean(Tensor a) { return scale(sum(a), real(1) / static_cast<real>(a.numel())); }

/// sum(a ⊙ w); the usual way to reduce a tensor to a scalar probe.
inline Tensor weighted_sum(Tensor a, Tensor w) { return sum(mul(a, w)); }

inline Tensor reshape(Tensor a, Shape shape) {
  require(shape_numel(shape) == a.numel(), ErrorKind::ShapeMismatch, "reshape ", shape_str(a.shape()), " -> ",
          shape_str(shape));
  return record(
      "reshape", {a}, [&] { return Tensor(shape, std::vector<real>(a.data().begin(), a.data().end())); },
      [a](std::span<const real> g) mutable {
        auto ga = grad_target(a);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
      });
}

/// Concatenation along axis 1.
inline Tensor concat_channels(std::vector<Tensor> parts) {
  require(!parts.empty(), ErrorKind::InvalidArgument, "concat_channels of zero tensors");
  const Shape& s0 = parts[0].shape();
  require(s0.size() >= 2, ErrorKind::ShapeMismatch, "concat_channels needs rank >= 2, got ", shape_str(s0));
  std::size_t total_c = 0;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == s0.size() && s[0] == s0[0];
    for (std::size_t i = 2; ok && i < s.size(); ++i) ok = s[i] == s0[i];
    require(ok, ErrorKind::ShapeMismatch, "concat_channels: ", shape_str(s0), " vs ", shape_str(s));
    total_c += s[1];
  }
  const std::size_t n = s0[0];
  const std::size_t inner = detail::inner_size(s0);
  Shape out_shape = s0;
  out_shape[1] = total_c;
  return record(
      "concat_channels", parts,
      [&] {
        Tensor y(out_shape);
        for (std::size_t b = 0; b < n; ++b) {
          std::size_t off = 0;
          for (const auto& p : parts) {
            const std::size_t len = p.dim(1) * inner;
            std::copy_n(p.ptr() + b * len, len, y.ptr() + (b * total_c) * inner + off);
            off += len;
          }
        }
        return y;
      },
      [parts, n, inner, total_c](std::span<const real> g) mutable {
        for (std::size_t b = 0; b < n; ++b) {
          std::size_t off = 0;
          for (auto& p : parts) {
            const std::size_t len = p.dim(1) * inner;
            auto gp = grad_target(p);
            if (!gp.empty()) {
              const real* src = g.data() + b * total_c * inner + off;
              for (std::size_t i = 0; i < len; ++i) gp[b * len + i] += src[i];
            }
            off += len;
          }
        }
      });
}

/// y[:, i] = x[:, index[i]] along axis 1.
inline Tensor gather_channels(Tensor x, std::vector<std::size_t> index) {
  const Shape& s = x.shape();
  require(s.size() >= 2, ErrorKind::ShapeMismatch, "gather_channels needs rank >= 2, got ", shape_str(s));
  for (auto c : index)
    require(c < s[1], ErrorKind::ShapeMismatch, "gather_channels: channel ", c, " out of range for ", shape_str(s));
  const std::size_t n = s[0], cin = s[1], inner = detail::inner_size(s);
  Shape out_shape = s;
  out_shape[1] = index.size();
  return record(
      "gather_channels", {x},
      [&] {
        Tensor y(out_shape);
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t i = 0; i < index.size(); ++i)
            std::copy_n(x.ptr() + (b * cin + index[i]) * inner, inner, y.ptr() + (b * index.size() + i) * inner);
        return y;
      },
      [x, index, n, cin, inner](std::span<const real> g) mutable {
        auto gx = grad_target(x);
        if (gx.empty()) return;
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t i = 0; i < index.size(); ++i) {
            real* dst = gx.data() + (b * cin + index[i]) * inner;
            const real* src = g.data() + (b * index.size() + i) * inner;
            for (std::size_t k = 0; k < inner; ++k) dst[k] += src[k];
          }
      });
}

/// Per-pixel mean over channels: (N,C,H,W) -> (N,1,H,W).
inline Tensor channel_mean(Tensor x) {
  require(x.rank() == 4, ErrorKind::ShapeMismatch, "channel_mean needs NCHW, got ", shape_str(x.shape()));
  const std::size_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  return record(
      "channel_mean", {x},
      [&] {
        Tensor y({n, 1, x.dim(2), x.dim(3)});
        for (std::size_t b = 0; b < n; ++b) {
          real* dst = y.ptr() + b * hw;
          for (std::size_t ch = 0; ch < c; ++ch) {
            const real* src = x.ptr() + (b * c + ch) * hw;
            for (std::size_t i = 0; i < hw; ++i) dst[i] += src[i];
          }
          for (std::size_t i = 0; i < hw; ++i) dst[i] /= static_cast<real>(c);
        }
        return y;
      },
      [x, n, c, hw](std::span<const real> g) mutable {
        auto gx = grad_target(x);
        if (gx.empty()) return;
        const real inv = real(1) / static_cast<real>(c);
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t ch = 0; ch < c; ++ch)
            for (std::size_t i = 0; i < hw; ++i) gx[(b * c + ch) * hw + i] += g[b * hw + i] * inv;
      });
}

/// Outer broadcast product: a (N,C) times s (N,1,H,W) -> (N,C,H,W).
inline Tensor outer_channel_spatial(Tensor a, Tensor s) {
  require(a.rank() == 2 && s.rank() == 4 && s.dim(1) == 1 && a.dim(0) == s.dim(0), ErrorKind::ShapeMismatch,
          "outer_channel_spatial: ", shape_str(a.shape()), " x ", shape_str(s.shape()));
  const std::size_t n = a.dim(0), c = a.dim(1), h = s.dim(2), w = s.dim(3), hw = h * w;
  return record(
      "outer_channel_spatial", {a, s},
      [&] {
        Tensor y({n, c, h, w});
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t ch = 0; ch < c; ++ch) {
            const real av = a[b * c + ch];
            real* dst = y.ptr() + (b * c + ch) * hw;
            const real* sv = s.ptr() + b * hw;
            for (std::size_t i = 0; i < hw; ++i) dst[i] = av * sv[i];
          }
        return y;
      },
      [a, s, n, c, hw](std::span<const real> g) mutable {
        auto ga = grad_target(a);
        auto gs = grad_target(s);
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t ch = 0; ch < c; ++ch) {
            const real* gv = g.data() + (b * c + ch) * hw;
            const real* sv = s.ptr() + b * hw;
            if (!ga.empty()) {
              real acc = 0;
              for (std::size_t i = 0; i < hw; ++i) acc += gv[i] * sv[i];
              ga[b * c + ch] += acc;
            }
            if (!gs.empty()) {
              const real av = a[b * c + ch];
              for (std::size_t i = 0; i < hw; ++i) gs[b * hw + i] += gv[i] * av;
            }
          }
      });
}

}  // namespace lanmsff
