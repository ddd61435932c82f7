#include "cwnet/ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cwnet/parallel.hpp"
#include "cwnet/simd.hpp"

namespace cwnet::ops {
namespace {

void check_size(std::span<const float> s, std::size_t expected, const char* what) {
  if (s.size() != expected) {
    throw Error(ErrorKind::ShapeMismatch, std::string(what) + ": expected " + std::to_string(expected) +
                                              " values, got " + std::to_string(s.size()));
  }
}

// Source index for each (output position, tap) along one axis.
std::vector<std::size_t> tap_index(std::size_t out_len, std::size_t in_len, std::size_t kernel, std::size_t stride) {
  std::vector<std::size_t> idx(out_len * kernel);
  const auto half = static_cast<std::ptrdiff_t>(kernel / 2);
  for (std::size_t o = 0; o < out_len; ++o) {
    for (std::size_t t = 0; t < kernel; ++t) {
      const auto src = static_cast<std::ptrdiff_t>(o * stride + t) - half;
      idx[o * kernel + t] = static_cast<std::size_t>(reflect_index(src, static_cast<std::ptrdiff_t>(in_len)));
    }
  }
  return idx;
}

}  // namespace

Image conv2d(const Image& x, const ConvParams& p, std::size_t stride) {
  if (x.channels() != p.in_channels) {
    throw Error(ErrorKind::ShapeMismatch, "conv2d: input has " + std::to_string(x.channels()) + " channels, weights expect " +
                                              std::to_string(p.in_channels));
  }
  const std::size_t k = p.kernel;
  const std::size_t cin = p.in_channels;
  const std::size_t cout = p.out_channels;
  check_size(p.weight, cout * cin * k * k, "conv2d weight");
  if (!p.bias.empty()) check_size(p.bias, cout, "conv2d bias");

  // Repack to [tap][in][out] so the inner loop runs over output channels.
  std::vector<float> packed(k * k * cin * cout);
  for (std::size_t o = 0; o < cout; ++o)
    for (std::size_t i = 0; i < cin; ++i)
      for (std::size_t t = 0; t < k * k; ++t) packed[(t * cin + i) * cout + o] = p.weight[(o * cin + i) * k * k + t];

  const std::size_t oh = (x.height() + stride - 1) / stride;
  const std::size_t ow = (x.width() + stride - 1) / stride;
  const auto rows = tap_index(oh, x.height(), k, stride);
  const auto cols = tap_index(ow, x.width(), k, stride);
  Image out(oh, ow, cout);
  parallel_for(oh, [&](std::size_t y) {
    for (std::size_t xo = 0; xo < ow; ++xo) {
      float* dst = out.pixel(y, xo);
      if (!p.bias.empty()) std::copy(p.bias.begin(), p.bias.end(), dst);
      for (std::size_t ky = 0; ky < k; ++ky) {
        const std::size_t sy = rows[y * k + ky];
        for (std::size_t kx = 0; kx < k; ++kx) {
          const float* src = x.pixel(sy, cols[xo * k + kx]);
          const float* w = packed.data() + (ky * k + kx) * cin * cout;
          for (std::size_t i = 0; i < cin; ++i) simd::axpy(dst, w + i * cout, src[i], cout);
        }
      }
    }
  });
  return out;
}

Image depthwise_conv(const Image& x, std::span<const float> weight, std::span<const float> bias, std::size_t kernel,
                     std::size_t multiplier) {
  const std::size_t k = kernel;
  const std::size_t cout = x.channels() * multiplier;
  check_size(weight, cout * k * k, "depthwise weight");
  if (!bias.empty()) check_size(bias, cout, "depthwise bias");

  std::vector<float> packed(k * k * cout);
  for (std::size_t o = 0; o < cout; ++o)
    for (std::size_t t = 0; t < k * k; ++t) packed[t * cout + o] = weight[o * k * k + t];

  const Image* src_img = &x;
  Image widened;
  if (multiplier > 1) {
    widened = Image(x.height(), x.width(), cout);
    for (std::size_t p = 0; p < x.pixels(); ++p)
      for (std::size_t o = 0; o < cout; ++o)
        widened.values()[p * cout + o] = x.values()[p * x.channels() + o / multiplier];
    src_img = &widened;
  }

  const auto rows = tap_index(x.height(), x.height(), k, 1);
  const auto cols = tap_index(x.width(), x.width(), k, 1);
  Image out(x.height(), x.width(), cout);
  parallel_for(x.height(), [&](std::size_t y) {
    for (std::size_t xo = 0; xo < x.width(); ++xo) {
      float* dst = out.pixel(y, xo);
      if (!bias.empty()) std::copy(bias.begin(), bias.end(), dst);
      for (std::size_t ky = 0; ky < k; ++ky) {
        const std::size_t sy = rows[y * k + ky];
        for (std::size_t kx = 0; kx < k; ++kx) {
          simd::fmadd(dst, packed.data() + (ky * k + kx) * cout, src_img->pixel(sy, cols[xo * k + kx]), cout);
        }
      }
    }
  });
  return out;
}

Image pointwise(const Image& x, std::span<const float> weight, std::span<const float> bias, std::size_t out_channels) {
  const std::size_t cin = x.channels();
  const std::size_t cout = out_channels;
  check_size(weight, cout * cin, "pointwise weight");
  if (!bias.empty()) check_size(bias, cout, "pointwise bias");
  std::vector<float> packed(cin * cout);
  for (std::size_t o = 0; o < cout; ++o)
    for (std::size_t i = 0; i < cin; ++i) packed[i * cout + o] = weight[o * cin + i];

  Image out(x.height(), x.width(), cout);
  parallel_for(x.height(), [&](std::size_t y) {
    for (std::size_t xo = 0; xo < x.width(); ++xo) {
      float* dst = out.pixel(y, xo);
      const float* src = x.pixel(y, xo);
      if (!bias.empty()) std::copy(bias.begin(), bias.end(), dst);
      for (std::size_t i = 0; i < cin; ++i) simd::axpy(dst, packed.data() + i * cout, src[i], cout);
    }
  });
  return out;
}

Image layer_norm(const Image& x, std::span<const float> gamma, std::span<const float> beta, float eps) {
  const std::size_t c = x.channels();
  check_size(gamma, c, "layer_norm scale");
  check_size(beta, c, "layer_norm shift");
  Image out(x.height(), x.width(), c);
  for (std::size_t p = 0; p < x.pixels(); ++p) {
    const float* src = x.values().data() + p * c;
    float* dst = out.values().data() + p * c;
    double mean = 0.0;
    for (std::size_t i = 0; i < c; ++i) mean += src[i];
    mean /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t i = 0; i < c; ++i) var += (src[i] - mean) * (src[i] - mean);
    var /= static_cast<double>(c);
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t i = 0; i < c; ++i) dst[i] = static_cast<float>((src[i] - mean) * inv) * gamma[i] + beta[i];
  }
  return out;
}

float silu(float v) noexcept { return v / (1.0f + std::exp(-v)); }

void silu_inplace(Image& x) {
  for (float& v : x.values()) v = silu(v);
}

Image simple_gate(const Image& x) {
  if (x.channels() % 2 != 0) {
    throw Error(ErrorKind::OddChannelCount, "simple_gate needs an even channel count, got " + std::to_string(x.channels()));
  }
  const std::size_t half = x.channels() / 2;
  Image out(x.height(), x.width(), half);
  for (std::size_t p = 0; p < x.pixels(); ++p) {
    const float* src = x.values().data() + p * x.channels();
    simd::mul(out.values().data() + p * half, src, src + half, half);
  }
  return out;
}

Image multiply(const Image& a, const Image& b) {
  require_same_shape(a, b, "multiply");
  Image out(a.height(), a.width(), a.channels());
  simd::mul(out.values().data(), a.values().data(), b.values().data(), a.size());
  return out;
}

Image upsample_nearest2(const Image& x) {
  Image out(x.height() * 2, x.width() * 2, x.channels());
  for (std::size_t y = 0; y < out.height(); ++y)
    for (std::size_t xo = 0; xo < out.width(); ++xo)
      std::copy_n(x.pixel(y / 2, xo / 2), x.channels(), out.pixel(y, xo));
  return out;
}

}  // namespace cwnet::ops
