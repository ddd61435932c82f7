#pragma once

#include <cstdint>
#include <filesystem>

#include "cwnet/tensor.hpp"

namespace cwnet {

/// Reads an 8-bit grayscale or RGB PNG into [0,1] floats (byte / 255).
/// An alpha channel, if present, is dropped. 16-bit, sub-byte and palette
/// images raise UnsupportedFormat.
Image load_image(const std::filesystem::path& path);

/// Clamps to [0,1], quantizes round-half-away-from-zero of v * 255 and
/// writes an 8-bit PNG. Channels must be 1 or 3.
void save_image(const Image& img, const std::filesystem::path& path);

std::uint8_t quantize(float v) noexcept;

/// Applies the save/load quantization in memory.
Image quantize_image(const Image& img);

}  // namespace cwnet
