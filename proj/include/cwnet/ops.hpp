#pragma once

#include <cstddef>
#include <span>

#include "cwnet/tensor.hpp"

// Layer primitives shared by every network block. Convolutions are
// cross-correlations with reflect padding; weights follow the
// (out, in, kh, kw) layout, depthwise weights (channels * multiplier, 1, k, k).

namespace cwnet::ops {

struct ConvParams {
  std::span<const float> weight;
  std::span<const float> bias;  // empty = no bias
  std::size_t out_channels = 0;
  std::size_t in_channels = 0;
  std::size_t kernel = 1;
};

/// Dense k x k convolution, reflect padded by k/2. stride 1 keeps the
/// spatial size; stride 2 gives ceil(h/2) x ceil(w/2).
Image conv2d(const Image& x, const ConvParams& p, std::size_t stride = 1);

/// Depthwise convolution; output channel o reads input channel o / multiplier.
Image depthwise_conv(const Image& x, std::span<const float> weight, std::span<const float> bias, std::size_t kernel,
                     std::size_t multiplier = 1);

/// Per-pixel linear map (1x1 convolution), weight is (out, in).
Image pointwise(const Image& x, std::span<const float> weight, std::span<const float> bias, std::size_t out_channels);

/// LayerNorm over the channel axis of each pixel.
Image layer_norm(const Image& x, std::span<const float> gamma, std::span<const float> beta, float eps = 1e-5f);

float silu(float v) noexcept;
void silu_inplace(Image& x);

/// Splits channels into halves (a, b) and returns a * b.
Image simple_gate(const Image& x);

/// Elementwise product of two same-shape images.
Image multiply(const Image& a, const Image& b);

Image upsample_nearest2(const Image& x);

}  // namespace cwnet::ops
