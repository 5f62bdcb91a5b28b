#pragma once

#include <array>
#include <vector>

#include "lanmsff/gemm.hpp"
#include "lanmsff/tensor.hpp"

namespace lanmsff::nn {

enum class Padding { Same, Valid };

/// Geometry of one spatial axis of a convolution.
struct AxisGeometry {
  std::size_t out = 0;
  std::size_t pad_begin = 0;
};

inline std::size_t effective_extent(std::size_t k, std::size_t dilation) { return k + (k - 1) * (dilation - 1); }

/// Same padding: out = ceil(in/stride), symmetric zero padding with the odd
/// pixel on the bottom/right. Valid: no padding.
inline AxisGeometry conv_axis(std::size_t in, std::size_t k, std::size_t stride, std::size_t dilation, Padding pad) {
  const std::size_t keff = effective_extent(k, dilation);
  AxisGeometry g;
  if (pad == Padding::Same) {
    g.out = (in + stride - 1) / stride;
    const std::ptrdiff_t total =
        static_cast<std::ptrdiff_t>((g.out - 1) * stride + keff) - static_cast<std::ptrdiff_t>(in);
    g.pad_begin = total > 0 ? static_cast<std::size_t>(total) / 2 : 0;
  } else {
    require(in >= keff, ErrorKind::ShapeMismatch, "valid convolution: input extent ", in,
            " smaller than effective kernel ", keff);
    g.out = (in - keff) / stride + 1;
  }
  return g;
}

struct ConvSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::array<std::size_t, 2> kernel{3, 3};
  std::array<std::size_t, 2> stride{1, 1};
  std::array<std::size_t, 2> dilation{1, 1};
  std::size_t groups = 1;
  Padding padding = Padding::Same;
  bool bias = true;

  void validate() const {
    require(in_channels > 0 && out_channels > 0 && groups > 0, ErrorKind::InvalidConfig,
            "conv: channels and groups must be positive (in=", in_channels, ", out=", out_channels,
            ", groups=", groups, ")");
    require(kernel[0] > 0 && kernel[1] > 0 && stride[0] > 0 && stride[1] > 0 && dilation[0] > 0 && dilation[1] > 0,
            ErrorKind::InvalidConfig, "conv: kernel, stride and dilation must be positive");
    require(in_channels % groups == 0 && out_channels % groups == 0, ErrorKind::InvalidConfig, "conv: groups=",
            groups, " does not divide in=", in_channels, " and out=", out_channels);
  }

  Shape weight_shape() const { return {out_channels, in_channels / groups, kernel[0], kernel[1]}; }
  std::size_t weight_count() const { return shape_numel(weight_shape()); }
  std::size_t parameter_count() const { return weight_count() + (bias ? out_channels : 0); }
  std::size_t fan_in() const { return (in_channels / groups) * kernel[0] * kernel[1]; }
  bool depthwise() const { return groups == in_channels; }
};

namespace detail {

struct ConvPlan {
  std::size_t n, cin, h, w, cout, ho, wo, kh, kw, sh, sw, dh, dw, pt, pl, groups, cg, og, kdim, pixels;
  bool pointwise_fast;  // 1x1, stride 1, no padding: columns are the input itself
};

inline ConvPlan make_plan(const Tensor& x, const ConvSpec& spec) {
  ConvPlan p{};
  p.n = x.dim(0);
  p.cin = x.dim(1);
  p.h = x.dim(2);
  p.w = x.dim(3);
  p.cout = spec.out_channels;
  p.kh = spec.kernel[0];
  p.kw = spec.kernel[1];
  p.sh = spec.stride[0];
  p.sw = spec.stride[1];
  p.dh = spec.dilation[0];
  p.dw = spec.dilation[1];
  const auto gh = conv_axis(p.h, p.kh, p.sh, p.dh, spec.padding);
  const auto gw = conv_axis(p.w, p.kw, p.sw, p.dw, spec.padding);
  p.ho = gh.out;
  p.wo = gw.out;
  p.pt = gh.pad_begin;
  p.pl = gw.pad_begin;
  p.groups = spec.groups;
  p.cg = p.cin / p.groups;
  p.og = p.cout / p.groups;
  p.kdim = p.cg * p.kh * p.kw;
  p.pixels = p.ho * p.wo;
  p.pointwise_fast = p.kh == 1 && p.kw == 1 && p.sh == 1 && p.sw == 1 && p.ho == p.h && p.wo == p.w;
  return p;
}

/// Unfolds channels [c0, c0+cg) of one image into a (cg*kh*kw, ho*wo) matrix.
inline void im2col(const ConvPlan& p, const real* img, std::size_t c0, real* cols) {
  for (std::size_t c = 0; c < p.cg; ++c) {
    const real* plane = img + (c0 + c) * p.h * p.w;
    for (std::size_t ki = 0; ki < p.kh; ++ki)
      for (std::size_t kj = 0; kj < p.kw; ++kj) {
        real* row = cols + ((c * p.kh + ki) * p.kw + kj) * p.pixels;
        for (std::size_t oh = 0; oh < p.ho; ++oh) {
          const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * p.sh + ki * p.dh) - static_cast<std::ptrdiff_t>(p.pt);
          real* dst = row + oh * p.wo;
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(p.h)) {
            std::fill_n(dst, p.wo, real(0));
            continue;
          }
          const real* src = plane + static_cast<std::size_t>(ih) * p.w;
          const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(kj * p.dw) - static_cast<std::ptrdiff_t>(p.pl);
          for (std::size_t ow = 0; ow < p.wo; ++ow) {
            const std::ptrdiff_t iw = base + static_cast<std::ptrdiff_t>(ow * p.sw);
            dst[ow] = (iw < 0 || iw >= static_cast<std::ptrdiff_t>(p.w)) ? real(0) : src[iw];
          }
        }
      }
  }
}

/// Adjoint of im2col: scatters a column matrix back onto image channels.
inline void col2im_add(const ConvPlan& p, const real* cols, std::size_t c0, real* img) {
  for (std::size_t c = 0; c < p.cg; ++c) {
    real* plane = img + (c0 + c) * p.h * p.w;
    for (std::size_t ki = 0; ki < p.kh; ++ki)
      for (std::size_t kj = 0; kj < p.kw; ++kj) {
        const real* row = cols + ((c * p.kh + ki) * p.kw + kj) * p.pixels;
        for (std::size_t oh = 0; oh < p.ho; ++oh) {
          const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * p.sh + ki * p.dh) - static_cast<std::ptrdiff_t>(p.pt);
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(p.h)) continue;
          real* dst = plane + static_cast<std::size_t>(ih) * p.w;
          const real* src = row + oh * p.wo;
          const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(kj * p.dw) - static_cast<std::ptrdiff_t>(p.pl);
          for (std::size_t ow = 0; ow < p.wo; ++ow) {
            const std::ptrdiff_t iw = base + static_cast<std::ptrdiff_t>(ow * p.sw);
            if (iw >= 0 && iw < static_cast<std::ptrdiff_t>(p.w)) dst[iw] += src[ow];
          }
        }
      }
  }
}

}  // namespace detail

/// Grouped, strided, dilated 2-D convolution over NCHW input.
/// Weights are (out, in/groups, kh, kw); bias is (out) when spec.bias.
inline Tensor conv2d(Tensor x, const ConvSpec& spec, Tensor weight, Tensor bias = {}) {
  spec.validate();
  require(x.rank() == 4, ErrorKind::ShapeMismatch, "conv2d: input must be NCHW, got ", shape_str(x.shape()));
  require(x.dim(1) == spec.in_channels, ErrorKind::ShapeMismatch, "conv2d: input has ", x.dim(1),
          " channels, spec expects ", spec.in_channels);
  require(weight.shape() == spec.weight_shape(), ErrorKind::ShapeMismatch, "conv2d: weight ",
          shape_str(weight.shape()), ", expected ", shape_str(spec.weight_shape()));
  require(spec.bias == bias.defined(), ErrorKind::InvalidArgument, "conv2d: bias tensor ",
          bias.defined() ? "given" : "missing", " but spec.bias=", spec.bias);
  if (bias.defined())
    require(bias.shape() == Shape{spec.out_channels}, ErrorKind::ShapeMismatch, "conv2d: bias ",
            shape_str(bias.shape()), ", expected (", spec.out_channels, ")");
  require(x.dim(2) > 0 && x.dim(3) > 0, ErrorKind::ShapeMismatch, "conv2d: empty spatial extent ",
          shape_str(x.shape()));

  const detail::ConvPlan p = detail::make_plan(x, spec);
  std::vector<Tensor> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);

  Tensor y({p.n, p.cout, p.ho, p.wo});
  {
    std::vector<real> cols(p.pointwise_fast ? 0 : p.kdim * p.pixels);
    for (std::size_t b = 0; b < p.n; ++b) {
      const real* img = x.ptr() + b * p.cin * p.h * p.w;
      real* out = y.ptr() + b * p.cout * p.pixels;
      for (std::size_t g = 0; g < p.groups; ++g) {
        const real* colp = img + g * p.cg * p.pixels;
        if (!p.pointwise_fast) {
          detail::im2col(p, img, g * p.cg, cols.data());
          colp = cols.data();
        }
        gemm::nn(p.og, p.pixels, p.kdim, weight.ptr() + g * p.og * p.kdim, p.kdim, colp, p.pixels,
                 out + g * p.og * p.pixels, p.pixels);
      }
      if (bias.defined())
        for (std::size_t o = 0; o < p.cout; ++o)
          for (std::size_t i = 0; i < p.pixels; ++i) out[o * p.pixels + i] += bias[o];
    }
  }

  return record_node("conv2d", std::move(inputs), y, [x, weight, bias, p](std::span<const real> g) mutable {
    auto gx = grad_target(x);
    auto gw = grad_target(weight);
    std::span<real> gb;
    if (bias.defined()) gb = grad_target(bias);
    std::vector<real> cols(p.pointwise_fast ? 0 : p.kdim * p.pixels);
    std::vector<real> dcols(gx.empty() ? 0 : p.kdim * p.pixels);
    for (std::size_t b = 0; b < p.n; ++b) {
      const real* img = x.ptr() + b * p.cin * p.h * p.w;
      const real* gout = g.data() + b * p.cout * p.pixels;
      for (std::size_t grp = 0; grp < p.groups; ++grp) {
        const real* gy = gout + grp * p.og * p.pixels;
        if (!gw.empty()) {
          const real* colp = img + grp * p.cg * p.pixels;
          if (!p.pointwise_fast) {
            detail::im2col(p, img, grp * p.cg, cols.data());
            colp = cols.data();
          }
          gemm::nt(p.og, p.kdim, p.pixels, gy, p.pixels, colp, p.pixels, gw.data() + grp * p.og * p.kdim, p.kdim);
        }
        if (!gx.empty()) {
          real* gimg = gx.data() + b * p.cin * p.h * p.w;
          if (p.pointwise_fast) {
            gemm::tn(p.cg, p.pixels, p.og, weight.ptr() + grp * p.og * p.kdim, p.kdim, gy, p.pixels,
                     gimg + grp * p.cg * p.pixels, p.pixels);
          } else {
            std::fill(dcols.begin(), dcols.end(), real(0));
            gemm::tn(p.kdim, p.pixels, p.og, weight.ptr() + grp * p.og * p.kdim, p.kdim, gy, p.pixels, dcols.data(),
                     p.pixels);
            detail::col2im_add(p, dcols.data(), grp * p.cg, gimg);
          }
        }
      }
      if (!gb.empty())
        for (std::size_t o = 0; o < p.cout; ++o) {
          real acc = 0;
          for (std::size_t i = 0; i < p.pixels; ++i) acc += gout[o * p.pixels + i];
          gb[o] += acc;
        }
    }
  });
}

/// Depthwise k×k convolution followed by a pointwise 1×1 convolution.
struct DwsSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::array<std::size_t, 2> kernel{3, 3};
  std::array<std::size_t, 2> dilation{1, 1};
  bool depthwise_bias = false;
  bool pointwise_bias = true;

  ConvSpec depthwise() const {
    ConvSpec s;
    s.in_channels = s.out_channels = s.groups = in_channels;
    s.kernel = kernel;
    s.dilation = dilation;
    s.bias = depthwise_bias;
    return s;
  }
  ConvSpec pointwise() const {
    ConvSpec s;
    s.in_channels = in_channels;
    s.out_channels = out_channels;
    s.kernel = {1, 1};
    s.bias = pointwise_bias;
    return s;
  }
  std::size_t parameter_count() const { return depthwise().parameter_count() + pointwise().parameter_count(); }
};

struct DwsWeights {
  Tensor depthwise;
  Tensor depthwise_bias;
  Tensor pointwise;
  Tensor pointwise_bias;
};

inline Tensor dws_conv(Tensor x, const DwsSpec& spec, const DwsWeights& w) {
  Tensor mid = conv2d(std::move(x), spec.depthwise(), w.depthwise, w.depthwise_bias);
  return conv2d(std::move(mid), spec.pointwise(), w.pointwise, w.pointwise_bias);
}

/// Transposed convolution: the exact adjoint of a same-padded strided
/// convolution that maps a `target` extent down to the input extent.
struct TransposedConvSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::array<std::size_t, 2> kernel{3, 3};
  std::array<std::size_t, 2> stride{2, 2};
  bool bias = true;

  Shape weight_shape() const { return {out_channels, in_channels, kernel[0], kernel[1]}; }
  std::size_t parameter_count() const { return shape_numel(weight_shape()) + (bias ? out_channels : 0); }
  std::size_t fan_in() const { return in_channels * kernel[0] * kernel[1]; }
};

/// Weights are (out, in, kh, kw). `target_h`/`target_w` default to
/// in*stride; any target whose same-padded strided convolution yields the
/// input extent is accepted.
inline Tensor transposed_conv2d(Tensor x, const TransposedConvSpec& spec, Tensor weight, Tensor bias = {},
                                std::size_t target_h = 0, std::size_t target_w = 0) {
  require(x.rank() == 4 && x.dim(1) == spec.in_channels, ErrorKind::ShapeMismatch, "transposed_conv2d: input ",
          shape_str(x.shape()), " vs in_channels ", spec.in_channels);
  require(weight.shape() == spec.weight_shape(), ErrorKind::ShapeMismatch, "transposed_conv2d: weight ",
          shape_str(weight.shape()), ", expected ", shape_str(spec.weight_shape()));
  require(spec.bias == bias.defined(), ErrorKind::InvalidArgument, "transposed_conv2d: bias presence mismatch");
  const std::size_t n = x.dim(0), cin = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::size_t sh = spec.stride[0], sw = spec.stride[1], kh = spec.kernel[0], kw = spec.kernel[1];
  const std::size_t th = target_h ? target_h : h * sh;
  const std::size_t tw = target_w ? target_w : w * sw;
  const auto gh = conv_axis(th, kh, sh, 1, Padding::Same);
  const auto gw = conv_axis(tw, kw, sw, 1, Padding::Same);
  require(gh.out == h && gw.out == w, ErrorKind::ShapeMismatch, "transposed_conv2d: cannot re-expand ", h, "x", w,
          " to ", th, "x", tw, " (a stride-", sh, " same convolution of ", th, "x", tw, " gives ", gh.out, "x", gw.out,
          ")");
  const std::size_t cout = spec.out_channels, pt = gh.pad_begin, pl = gw.pad_begin;
  std::vector<Tensor> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);

  // Output pixel p receives input q through tap k where q*s + k = p + pad.
  Tensor y({n, cout, th, tw});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t o = 0; o < cout; ++o)
      for (std::size_t ph = 0; ph < th; ++ph)
        for (std::size_t pw = 0; pw < tw; ++pw) {
          real acc = bias.defined() ? bias[o] : real(0);
          for (std::size_t ki = 0; ki < kh; ++ki) {
            const std::ptrdiff_t num_h = static_cast<std::ptrdiff_t>(ph + pt) - static_cast<std::ptrdiff_t>(ki);
            if (num_h < 0 || num_h % static_cast<std::ptrdiff_t>(sh)) continue;
            const std::size_t qh = static_cast<std::size_t>(num_h) / sh;
            if (qh >= h) continue;
            for (std::size_t kj = 0; kj < kw; ++kj) {
              const std::ptrdiff_t num_w = static_cast<std::ptrdiff_t>(pw + pl) - static_cast<std::ptrdiff_t>(kj);
              if (num_w < 0 || num_w % static_cast<std::ptrdiff_t>(sw)) continue;
              const std::size_t qw = static_cast<std::size_t>(num_w) / sw;
              if (qw >= w) continue;
              for (std::size_t i = 0; i < cin; ++i)
                acc += x.at(b, i, qh, qw) * weight[((o * cin + i) * kh + ki) * kw + kj];
            }
          }
          y.at(b, o, ph, pw) = acc;
        }

  return record_node("transposed_conv2d", std::move(inputs), y,
                     [x, weight, bias, n, cin, h, w, cout, th, tw, kh, kw, sh, sw, pt, pl](std::span<const real> g) mutable {
                       auto gx = grad_target(x);
                       auto gwt = grad_target(weight);
                       std::span<real> gb;
                       if (bias.defined()) gb = grad_target(bias);
                       for (std::size_t b = 0; b < n; ++b)
                         for (std::size_t o = 0; o < cout; ++o)
                           for (std::size_t ph = 0; ph < th; ++ph)
                             for (std::size_t pw = 0; pw < tw; ++pw) {
                               const real go = g[((b * cout + o) * th + ph) * tw + pw];
                               if (!gb.empty()) gb[o] += go;
                               for (std::size_t ki = 0; ki < kh; ++ki) {
                                 const std::ptrdiff_t num_h = static_cast<std::ptrdiff_t>(ph + pt) - static_cast<std::ptrdiff_t>(ki);
                                 if (num_h < 0 || num_h % static_cast<std::ptrdiff_t>(sh)) continue;
                                 const std::size_t qh = static_cast<std::size_t>(num_h) / sh;
                                 if (qh >= h) continue;
                                 for (std::size_t kj = 0; kj < kw; ++kj) {
                                   const std::ptrdiff_t num_w = static_cast<std::ptrdiff_t>(pw + pl) - static_cast<std::ptrdiff_t>(kj);
                                   if (num_w < 0 || num_w % static_cast<std::ptrdiff_t>(sw)) continue;
                                   const std::size_t qw = static_cast<std::size_t>(num_w) / sw;
                                   if (qw >= w) continue;
                                   for (std::size_t i = 0; i < cin; ++i) {
                                     const std::size_t widx = ((o * cin + i) * kh + ki) * kw + kj;
                                     const std::size_t xidx = ((b * cin + i) * h + qh) * w + qw;
                                     if (!gx.empty()) gx[xidx] += go * weight[widx];
                                     if (!gwt.empty()) gwt[widx] += go * x[xidx];
                                   }
                                 }
                               }
                             }
                     });
}

}  // namespace lanmsff::nn
