#include "cwnet/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace cwnet {
namespace {

constexpr std::array<std::uint8_t, 8> kPngSignature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

struct PngHeader {
  std::uint8_t bit_depth;
  std::uint8_t color_type;
};

// Signature (8) + IHDR length/type (8) + width/height (8) + depth + color type.
PngHeader read_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::array<std::uint8_t, 26> head{};
  in.read(reinterpret_cast<char*>(head.data()), head.size());
  if (in.gcount() != static_cast<std::streamsize>(head.size()) ||
      !std::equal(kPngSignature.begin(), kPngSignature.end(), head.begin()) ||
      std::memcmp(head.data() + 12, "IHDR", 4) != 0) {
    throw Error(ErrorKind::UnsupportedFormat, path.string() + " is not a PNG file");
  }
  return {head[24], head[25]};
}

}  // namespace

std::uint8_t quantize(float v) noexcept {
  if (!(v > 0.0f)) return 0;  // also maps NaN to 0
  if (v >= 1.0f) return 255;
  return static_cast<std::uint8_t>(std::lround(static_cast<double>(v) * 255.0));
}

Image quantize_image(const Image& img) {
  Image out = img;
  for (float& v : out.values()) v = static_cast<float>(quantize(v)) / 255.0f;
  return out;
}

Image load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::FileNotFound, path.string());
  const PngHeader header = read_header(path);
  if (header.bit_depth != 8) {
    throw Error(ErrorKind::UnsupportedFormat, "bit depth " + std::to_string(header.bit_depth) + " in " + path.string());
  }
  if (header.color_type & PNG_COLOR_MASK_PALETTE) {
    throw Error(ErrorKind::UnsupportedFormat, "palette image " + path.string());
  }
  const bool color = (header.color_type & PNG_COLOR_MASK_COLOR) != 0;

  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw Error(ErrorKind::UnsupportedFormat, std::string(image.message));
  }
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t channels = color ? 3 : 1;
  std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(image));
  // Leave gamma/background handling to libpng's defaults for opaque data.
  if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr)) {
    std::string message(image.message);
    png_image_free(&image);
    throw Error(ErrorKind::UnsupportedFormat, message);
  }
  Image out(image.height, image.width, channels);
  auto values = out.values();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<float>(bytes[i]) / 255.0f;
  return out;
}

void save_image(const Image& img, const std::filesystem::path& path) {
  if (img.channels() != 1 && img.channels() != 3) {
    throw Error(ErrorKind::UnsupportedFormat, "cannot save " + std::to_string(img.channels()) + "-channel image");
  }
  std::vector<std::uint8_t> bytes(img.size());
  auto values = img.values();
  std::transform(values.begin(), values.end(), bytes.begin(), quantize);

  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, bytes.data(), 0, nullptr)) {
    throw Error(ErrorKind::IoError, path.string() + ": " + image.message);
  }
}

}  // namespace cwnet
