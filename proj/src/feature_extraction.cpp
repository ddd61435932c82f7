#include "cwnet/feature_extraction.hpp"

#include "cwnet/ops.hpp"

namespace cwnet {

Image directional_filter(const Image& x, const Kernel3x3& kernel) {
  const std::size_t h = x.height();
  const std::size_t w = x.width();
  const std::size_t ch = x.channels();
  Image out(h, w, ch);
  const auto ih = static_cast<std::ptrdiff_t>(h);
  const auto iw = static_cast<std::ptrdiff_t>(w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t col = 0; col < w; ++col) {
      float* dst = out.pixel(y, col);
      for (std::ptrdiff_t ky = 0; ky < 3; ++ky) {
        const auto sy = static_cast<std::size_t>(reflect_index(static_cast<std::ptrdiff_t>(y) + ky - 1, ih));
        for (std::ptrdiff_t kx = 0; kx < 3; ++kx) {
          const float tap = kernel[static_cast<std::size_t>(ky)][static_cast<std::size_t>(kx)];
          if (tap == 0.0f) continue;
          const auto sx = static_cast<std::size_t>(reflect_index(static_cast<std::ptrdiff_t>(col) + kx - 1, iw));
          const float* src = x.pixel(sy, sx);
          for (std::size_t c = 0; c < ch; ++c) dst[c] += tap * src[c];
        }
      }
    }
  }
  return out;
}

Image directional_conv(const Image& x, const Kernel3x3& kernel, const PointwiseMix& mix) {
  return ops::pointwise(directional_filter(x, kernel), mix.weight, mix.bias, x.channels());
}

namespace {

Image detail(const Image& band, const Image& low, const Kernel3x3& kernel, const DetailBranch& branch) {
  Image out = ops::depthwise_conv(band, branch.depthwise, branch.bias, 3);
  add_inplace(out, directional_conv(low, kernel, branch.mix));
  return out;
}

}  // namespace

WaveletSubbands fe_forward(const WaveletSubbands& sb, const FeBlockWeights& w) {
  if (!sb.consistent()) throw Error(ErrorKind::ShapeMismatch, "fe_forward: inconsistent sub-bands");
  if (sb.low.channels() != w.channels) {
    throw Error(ErrorKind::ShapeMismatch, "fe_forward: bands have " + std::to_string(sb.low.channels()) +
                                              " channels, weights " + std::to_string(w.channels));
  }
  WaveletSubbands out;
  out.low = wtconv(sb.low, w.wtconv);
  out.horiz = detail(sb.horiz, out.low, directional::kHorizontal, w.horiz);
  out.vert = detail(sb.vert, out.low, directional::kVertical, w.vert);
  out.diag = detail(sb.diag, out.low, directional::kDiagonal, w.diag);
  return out;
}

}  // namespace cwnet
