#pragma once

#include <cstddef>
#include <span>

#include "cwnet/tensor.hpp"

namespace cwnet {

/// Frequency-domain 1x1 map. At every frequency the spectrum of each
/// channel is stacked as an interleaved (real, imag) pair, so the vector is
/// [Re X_0, Im X_0, Re X_1, Im X_1, ...] of length 2 * channels.
struct FfcWeights {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::span<const float> spectral_weight;  // (2 * out, 2 * in)
  std::span<const float> spectral_bias;    // (2 * out) or empty
};

enum class FfcMode {
  Relu,    // normal operation
  Linear,  // nonlinearity bypassed, for testing the transform path
};

/// DFT per channel -> stacked real/imag 1x1 map -> ReLU -> inverse DFT,
/// keeping the real part. Forward DFT unnormalized, inverse 1 / (h w).
Image ffc_conv(const Image& x, const FfcWeights& w, FfcMode mode = FfcMode::Relu);

struct LfebWeights {
  std::size_t channels = 0;  // C
  // block 1
  FfcWeights ffc1;
  std::span<const float> spatial_weight;  // (2C, 1, 5, 5), depthwise with multiplier 2
  std::span<const float> spatial_bias;    // (2C)
  std::span<const float> proj_weight;     // (C, C)
  std::span<const float> proj_bias;       // (C)
  // block 2
  FfcWeights ffc2;
  std::span<const float> expand_weight;    // (4C, C)
  std::span<const float> expand_bias;      // (4C)
  std::span<const float> compress_weight;  // (C, 2C)
  std::span<const float> compress_bias;    // (C)
};

inline constexpr std::size_t kLfebSpatialKernel = 5;

/// y1 = x + proj(simple_gate(spatial5x5(ffc1(x))))
/// y2 = y1 + compress(simple_gate(expand(ffc2(y1))))
Image lfeb_block(const Image& x, const LfebWeights& w);

}  // namespace cwnet
