#pragma once

#include <array>
#include <span>

#include "cwnet/tensor.hpp"
#include "cwnet/wavelet.hpp"

namespace cwnet {

using Kernel3x3 = std::array<std::array<float, 3>, 3>;

/// Fixed cross-injection kernels. Every row or column pattern sums to zero,
/// so each one annihilates constant regions.
namespace directional {
inline constexpr Kernel3x3 kHorizontal{{{1.0f, 0.0f, -1.0f}, {1.0f, 0.0f, -1.0f}, {1.0f, 0.0f, -1.0f}}};
inline constexpr Kernel3x3 kVertical{{{1.0f, 1.0f, 1.0f}, {0.0f, 0.0f, 0.0f}, {-1.0f, -1.0f, -1.0f}}};
inline constexpr Kernel3x3 kDiagonal{{{0.0f, 1.0f, 0.0f}, {1.0f, -4.0f, 1.0f}, {0.0f, 1.0f, 0.0f}}};
}  // namespace directional

/// Learned 1x1 channel mix applied after a fixed directional filter.
struct PointwiseMix {
  std::span<const float> weight;  // (channels, channels)
  std::span<const float> bias;    // (channels) or empty
};

/// Applies `kernel` to every channel (reflect padded), no mixing.
Image directional_filter(const Image& x, const Kernel3x3& kernel);

/// directional_filter followed by the learned pointwise mix.
Image directional_conv(const Image& x, const Kernel3x3& kernel, const PointwiseMix& mix);

struct DetailBranch {
  std::span<const float> depthwise;  // (channels, 1, 3, 3)
  std::span<const float> bias;       // (channels) or empty
  PointwiseMix mix;
};

struct FeBlockWeights {
  std::size_t channels = 0;
  WtConvWeights wtconv;
  DetailBranch horiz;
  DetailBranch vert;
  DetailBranch diag;
};

/// L' = wtconv(L); each detail band becomes depthwise(band) plus the
/// matching directional response of L'.
WaveletSubbands fe_forward(const WaveletSubbands& sb, const FeBlockWeights& w);

}  // namespace cwnet
