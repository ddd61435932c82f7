#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cwnet/tensor.hpp"

namespace cwnet {

/// One orthonormal Haar level: low-pass plus horizontal, vertical and
/// diagonal detail bands, each at half resolution.
struct WaveletSubbands {
  Image low;
  Image horiz;
  Image vert;
  Image diag;

  bool consistent() const noexcept {
    return low.same_shape(horiz) && low.same_shape(vert) && low.same_shape(diag);
  }
};

/// For each 2x2 block [[a, b], [c, d]]:
///   L = (a+b+c+d)/2, H = (a-b+c-d)/2, V = (a+b-c-d)/2, D = (a-b-c+d)/2.
/// Throws OddDimension unless height and width are even.
WaveletSubbands dwt2(const Image& x);

/// Exact inverse of dwt2.
Image idwt2(const WaveletSubbands& sb);

/// Wavelet-domain depthwise convolution. kernel_size odd, levels >= 1.
struct WtConvConfig {
  std::size_t levels = 3;
  std::size_t kernel_size = 5;
};

/// Weights for a WTConv layer over `channels` channels:
///   base: (channels, 1, k, k)
///   level[l]: (4 * channels, 1, k, k), band-major L, H, V, D
struct WtConvWeights {
  WtConvConfig config;
  std::size_t channels = 0;
  std::span<const float> base;
  std::vector<std::span<const float>> level;
};

/// y = depthwise(x, base) + reconstruction of the convolved wavelet cascade.
/// Level l decomposes the raw low band of level l-1; every band of a level
/// is convolved with that level's kernels, and reconstruction runs from the
/// deepest level up, adding each reconstructed result to the convolved low
/// band above it.
Image wtconv(const Image& x, const WtConvWeights& w);

}  // namespace cwnet
