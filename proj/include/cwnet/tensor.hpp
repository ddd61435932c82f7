#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cwnet/error.hpp"

namespace cwnet {

/// Dense height x width x channels float image, row-major with channels
/// interleaved (HWC). Used both for RGB images and for feature maps.
class Image {
 public:
  Image() = default;
  Image(std::size_t height, std::size_t width, std::size_t channels, float fill = 0.0f);
  Image(std::size_t height, std::size_t width, std::size_t channels, std::vector<float> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t pixels() const noexcept { return height_ * width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  float& at(std::size_t y, std::size_t x, std::size_t c) noexcept {
    return data_[(y * width_ + x) * channels_ + c];
  }
  float at(std::size_t y, std::size_t x, std::size_t c) const noexcept {
    return data_[(y * width_ + x) * channels_ + c];
  }

  float* pixel(std::size_t y, std::size_t x) noexcept { return data_.data() + (y * width_ + x) * channels_; }
  const float* pixel(std::size_t y, std::size_t x) const noexcept {
    return data_.data() + (y * width_ + x) * channels_;
  }

  std::span<float> values() noexcept { return data_; }
  std::span<const float> values() const noexcept { return data_; }
  const std::vector<float>& data() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }
  std::string shape_string() const;

  bool all_finite() const noexcept;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<float> data_;
};

void require_same_shape(const Image& a, const Image& b, const char* context);

/// Channel slice [first, first + count) of every pixel.
Image slice_channels(const Image& x, std::size_t first, std::size_t count);

/// Swaps the two spatial axes.
Image transpose(const Image& x);

Image add(const Image& a, const Image& b);
void add_inplace(Image& a, const Image& b);
Image scale(const Image& a, float s);

float max_abs_diff(const Image& a, const Image& b);

/// Mirror index in [0, n) without edge repetition (numpy "reflect"), folding
/// repeatedly so any integer offset is valid.
std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n) noexcept;

/// Pads bottom/right with mirrored content up to the requested size.
Image pad_reflect(const Image& x, std::size_t height, std::size_t width);
Image crop(const Image& x, std::size_t height, std::size_t width);

}  // namespace cwnet
