#include "cwnet/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace cwnet {

Image::Image(std::size_t height, std::size_t width, std::size_t channels, float fill)
    : height_(height), width_(width), channels_(channels), data_(height * width * channels, fill) {}

Image::Image(std::size_t height, std::size_t width, std::size_t channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  if (data_.size() != height * width * channels) {
    throw Error(ErrorKind::ShapeMismatch, "data length " + std::to_string(data_.size()) + " does not match " +
                                              shape_string());
  }
}

std::string Image::shape_string() const {
  return std::to_string(height_) + "x" + std::to_string(width_) + "x" + std::to_string(channels_);
}

bool Image::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

void require_same_shape(const Image& a, const Image& b, const char* context) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::ShapeMismatch,
                std::string(context) + ": " + a.shape_string() + " vs " + b.shape_string());
  }
}

Image slice_channels(const Image& x, std::size_t first, std::size_t count) {
  if (first + count > x.channels()) throw Error(ErrorKind::ShapeMismatch, "channel slice out of range");
  Image out(x.height(), x.width(), count);
  const std::size_t c = x.channels();
  const float* src = x.values().data();
  float* dst = out.values().data();
  for (std::size_t p = 0; p < x.pixels(); ++p) {
    std::copy_n(src + p * c + first, count, dst + p * count);
  }
  return out;
}

Image transpose(const Image& x) {
  Image out(x.width(), x.height(), x.channels());
  for (std::size_t y = 0; y < x.height(); ++y) {
    for (std::size_t col = 0; col < x.width(); ++col) {
      std::copy_n(x.pixel(y, col), x.channels(), out.pixel(col, y));
    }
  }
  return out;
}

Image add(const Image& a, const Image& b) {
  Image out = a;
  add_inplace(out, b);
  return out;
}

void add_inplace(Image& a, const Image& b) {
  require_same_shape(a, b, "add");
  auto dst = a.values();
  auto src = b.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

Image scale(const Image& a, float s) {
  Image out = a;
  for (float& v : out.values()) v *= s;
  return out;
}

float max_abs_diff(const Image& a, const Image& b) {
  require_same_shape(a, b, "max_abs_diff");
  float worst = 0.0f;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) worst = std::max(worst, std::abs(va[i] - vb[i]));
  return worst;
}

std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n) noexcept {
  if (n <= 1) return 0;
  const std::ptrdiff_t period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

Image pad_reflect(const Image& x, std::size_t height, std::size_t width) {
  if (height < x.height() || width < x.width()) throw Error(ErrorKind::ShapeMismatch, "pad target smaller than input");
  Image out(height, width, x.channels());
  const auto h = static_cast<std::ptrdiff_t>(x.height());
  const auto w = static_cast<std::ptrdiff_t>(x.width());
  for (std::size_t y = 0; y < height; ++y) {
    const auto sy = static_cast<std::size_t>(reflect_index(static_cast<std::ptrdiff_t>(y), h));
    for (std::size_t col = 0; col < width; ++col) {
      const auto sx = static_cast<std::size_t>(reflect_index(static_cast<std::ptrdiff_t>(col), w));
      std::copy_n(x.pixel(sy, sx), x.channels(), out.pixel(y, col));
    }
  }
  return out;
}

Image crop(const Image& x, std::size_t height, std::size_t width) {
  if (height > x.height() || width > x.width()) throw Error(ErrorKind::ShapeMismatch, "crop larger than input");
  Image out(height, width, x.channels());
  for (std::size_t y = 0; y < height; ++y) {
    std::copy_n(x.pixel(y, 0), width * x.channels(), out.pixel(y, 0));
  }
  return out;
}

}  // namespace cwnet
