#include "cwnet/wavelet.hpp"

#include "cwnet/ops.hpp"

namespace cwnet {

WaveletSubbands dwt2(const Image& x) {
  if (x.height() % 2 != 0 || x.width() % 2 != 0 || x.empty()) {
    throw Error(ErrorKind::OddDimension, "dwt2 needs even non-zero height and width, got " + x.shape_string());
  }
  const std::size_t h = x.height() / 2;
  const std::size_t w = x.width() / 2;
  const std::size_t ch = x.channels();
  WaveletSubbands sb{Image(h, w, ch), Image(h, w, ch), Image(h, w, ch), Image(h, w, ch)};
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t col = 0; col < w; ++col) {
      const float* pa = x.pixel(2 * y, 2 * col);
      const float* pb = x.pixel(2 * y, 2 * col + 1);
      const float* pc = x.pixel(2 * y + 1, 2 * col);
      const float* pd = x.pixel(2 * y + 1, 2 * col + 1);
      float* l = sb.low.pixel(y, col);
      float* hh = sb.horiz.pixel(y, col);
      float* v = sb.vert.pixel(y, col);
      float* d = sb.diag.pixel(y, col);
      for (std::size_t c = 0; c < ch; ++c) {
        const float a = pa[c], b = pb[c], cc = pc[c], dd = pd[c];
        l[c] = 0.5f * ((a + b) + (cc + dd));
        hh[c] = 0.5f * ((a - b) + (cc - dd));
        v[c] = 0.5f * ((a + b) - (cc + dd));
        d[c] = 0.5f * ((a - b) - (cc - dd));
      }
    }
  }
  return sb;
}

Image idwt2(const WaveletSubbands& sb) {
  if (!sb.consistent()) {
    throw Error(ErrorKind::ShapeMismatch, "idwt2 sub-bands disagree: " + sb.low.shape_string() + ", " +
                                              sb.horiz.shape_string() + ", " + sb.vert.shape_string() + ", " +
                                              sb.diag.shape_string());
  }
  const std::size_t h = sb.low.height();
  const std::size_t w = sb.low.width();
  const std::size_t ch = sb.low.channels();
  Image out(2 * h, 2 * w, ch);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t col = 0; col < w; ++col) {
      const float* l = sb.low.pixel(y, col);
      const float* hh = sb.horiz.pixel(y, col);
      const float* v = sb.vert.pixel(y, col);
      const float* d = sb.diag.pixel(y, col);
      float* pa = out.pixel(2 * y, 2 * col);
      float* pb = out.pixel(2 * y, 2 * col + 1);
      float* pc = out.pixel(2 * y + 1, 2 * col);
      float* pd = out.pixel(2 * y + 1, 2 * col + 1);
      for (std::size_t c = 0; c < ch; ++c) {
        pa[c] = 0.5f * ((l[c] + hh[c]) + (v[c] + d[c]));
        pb[c] = 0.5f * ((l[c] - hh[c]) + (v[c] - d[c]));
        pc[c] = 0.5f * ((l[c] + hh[c]) - (v[c] + d[c]));
        pd[c] = 0.5f * ((l[c] - hh[c]) - (v[c] - d[c]));
      }
    }
  }
  return out;
}

Image wtconv(const Image& x, const WtConvWeights& w) {
  const std::size_t k = w.config.kernel_size;
  const std::size_t levels = w.config.levels;
  const std::size_t ch = w.channels;
  if (levels == 0 || k % 2 == 0) throw Error(ErrorKind::InvalidArgument, "wtconv needs levels >= 1 and odd kernel");
  if (x.channels() != ch) throw Error(ErrorKind::ShapeMismatch, "wtconv channel count mismatch");
  if (w.level.size() != levels) throw Error(ErrorKind::ShapeMismatch, "wtconv level kernel count mismatch");
  const std::size_t per_band = ch * k * k;

  std::vector<WaveletSubbands> convolved;
  convolved.reserve(levels);
  Image current = x;
  for (std::size_t l = 0; l < levels; ++l) {
    WaveletSubbands sb = dwt2(current);
    current = sb.low;
    const auto kernels = w.level[l];
    if (kernels.size() != 4 * per_band) throw Error(ErrorKind::ShapeMismatch, "wtconv level kernel size");
    const std::span<const float> none;
    convolved.push_back({ops::depthwise_conv(sb.low, kernels.subspan(0, per_band), none, k),
                         ops::depthwise_conv(sb.horiz, kernels.subspan(per_band, per_band), none, k),
                         ops::depthwise_conv(sb.vert, kernels.subspan(2 * per_band, per_band), none, k),
                         ops::depthwise_conv(sb.diag, kernels.subspan(3 * per_band, per_band), none, k)});
  }

  Image carry;
  for (std::size_t l = levels; l-- > 0;) {
    WaveletSubbands& sb = convolved[l];
    if (!carry.empty()) add_inplace(sb.low, carry);
    carry = idwt2(sb);
  }
  Image y = ops::depthwise_conv(x, w.base, {}, k);
  add_inplace(y, carry);
  return y;
}

}  // namespace cwnet
