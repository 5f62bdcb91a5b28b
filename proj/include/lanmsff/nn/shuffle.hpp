#pragma once

#include <utility>
#include <vector>

#include "lanmsff/ops.hpp"

namespace lanmsff::nn {

/// Two-group channel shuffle followed by a split into halves: channel i of
/// group g is original channel 2i+g, so group A holds the even channels and
/// group B the odd ones.
inline std::pair<Tensor, Tensor> channel_shuffle_split(Tensor x) {
  require(x.rank() >= 2, ErrorKind::ShapeMismatch, "channel_shuffle_split needs rank >= 2, got ",
          shape_str(x.shape()));
  const std::size_t c = x.dim(1);
  require(c % 2 == 0, ErrorKind::ShapeMismatch, "channel_shuffle_split needs an even channel count, got ", c);
  std::vector<std::size_t> even, odd;
  for (std::size_t i = 0; i < c / 2; ++i) {
    even.push_back(2 * i);
    odd.push_back(2 * i + 1);
  }
  return {gather_channels(x, std::move(even)), gather_channels(x, std::move(odd))};
}

/// Inverse of channel_shuffle_split: re-interleaves the two halves.
inline Tensor channel_unshuffle(Tensor a, Tensor b) {
  const std::size_t half = a.dim(1);
  std::vector<std::size_t> order(2 * half);
  for (std::size_t i = 0; i < half; ++i) {
    order[2 * i] = i;
    order[2 * i + 1] = half + i;
  }
  return gather_channels(concat_channels({std::move(a), std::move(b)}), std::move(order));
}

}  // namespace lanmsff::nn
