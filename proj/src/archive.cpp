#include "cwnet/archive.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

namespace cwnet {

std::size_t NamedTensor::element_count() const noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::uint64_t b) { return a * static_cast<std::size_t>(b); });
}

std::string NamedTensor::shape_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

void WeightArchive::add(std::string name, std::vector<std::uint64_t> shape, std::vector<float> data) {
  if (name.empty() || name.size() > 0xFFFF) throw Error(ErrorKind::InvalidArgument, "tensor name length out of range");
  if (shape.size() > 0xFF) throw Error(ErrorKind::InvalidArgument, "tensor rank above 255");
  if (index_.contains(name)) throw Error(ErrorKind::InvalidArgument, "duplicate tensor name " + name);
  NamedTensor t{std::move(name), std::move(shape), std::move(data)};
  if (t.element_count() != t.data.size()) {
    throw Error(ErrorKind::ShapeMismatch, t.name + ": shape " + t.shape_string() + " does not match " +
                                              std::to_string(t.data.size()) + " values");
  }
  for (float v : t.data) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, t.name + " holds a non-finite value");
  }
  index_.emplace(t.name, tensors_.size());
  tensors_.push_back(std::move(t));
}

void WeightArchive::add_image(std::string name, const Image& img) {
  add(std::move(name), {img.height(), img.width(), img.channels()}, img.data());
}

const NamedTensor* WeightArchive::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &tensors_[it->second];
}

const NamedTensor& WeightArchive::get(const std::string& name) const {
  const NamedTensor* t = find(name);
  if (t == nullptr) throw Error(ErrorKind::WeightMissing, name);
  return *t;
}

std::span<const float> WeightArchive::view(const std::string& name, const std::vector<std::uint64_t>& shape) const {
  const NamedTensor& t = get(name);
  if (t.shape != shape) {
    NamedTensor expected{name, shape, {}};
    throw Error(ErrorKind::ShapeMismatch, name + ": stored " + t.shape_string() + ", expected " + expected.shape_string());
  }
  return t.data;
}

Image WeightArchive::image(const std::string& name) const {
  const NamedTensor& t = get(name);
  if (t.shape.size() != 3) throw Error(ErrorKind::ShapeMismatch, name + " is not a rank-3 image tensor");
  return Image(t.shape[0], t.shape[1], t.shape[2], t.data);
}

std::size_t WeightArchive::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.data.size();
  return n;
}

namespace {

class Writer {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_integral_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
  void put_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(static_cast<T>(bytes_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return value;
  }
  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t position() const noexcept { return pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (n > bytes_.size() - pos_) {
      throw Error(ErrorKind::Truncated, std::string("archive ends inside ") + what + " at byte " + std::to_string(pos_));
    }
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - offset, 1u << 30));
    crc = ::crc32(crc, bytes.data() + offset, chunk);
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

constexpr char kMagic[4] = {'C', 'W', 'N', 'T'};

}  // namespace

std::vector<std::uint8_t> serialize_archive(const WeightArchive& archive) {
  Writer w;
  w.put_bytes(kMagic, 4);
  w.put<std::uint32_t>(kArchiveVersion);
  w.put<std::uint64_t>(archive.size());
  for (const auto& t : archive.tensors()) {
    w.put<std::uint16_t>(static_cast<std::uint16_t>(t.name.size()));
    w.put_bytes(t.name.data(), t.name.size());
    w.put<std::uint8_t>(static_cast<std::uint8_t>(t.shape.size()));
    for (auto d : t.shape) w.put<std::uint64_t>(d);
    for (float v : t.data) w.put<std::uint32_t>(std::bit_cast<std::uint32_t>(v));
  }
  const std::uint32_t crc = crc32_of(w.bytes());
  w.put<std::uint32_t>(crc);
  return std::move(w.bytes());
}

WeightArchive deserialize_archive(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw Error(ErrorKind::BadMagic, "not a CWNT archive");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kArchiveVersion) {
    throw Error(ErrorKind::UnsupportedVersion, "archive version " + std::to_string(version));
  }
  const auto count = r.get<std::uint64_t>("tensor count");
  std::vector<NamedTensor> parsed;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = r.get<std::uint16_t>("name length");
    const auto name_bytes = r.take(name_len, "tensor name");
    std::string name(name_bytes.begin(), name_bytes.end());
    const auto rank = r.get<std::uint8_t>("rank");
    std::vector<std::uint64_t> shape(rank);
    std::uint64_t elements = 1;
    for (auto& d : shape) {
      d = r.get<std::uint64_t>("dims");
      if (d != 0 && elements > (bytes.size() / 4) / d) throw Error(ErrorKind::Truncated, name + ": dims exceed file size");
      elements *= d;
    }
    const auto raw = r.take(static_cast<std::size_t>(elements) * 4, "tensor data");
    std::vector<float> data(static_cast<std::size_t>(elements));
    for (std::size_t k = 0; k < data.size(); ++k) {
      std::uint32_t bits = 0;
      for (std::size_t b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(raw[4 * k + b]) << (8 * b);
      data[k] = std::bit_cast<float>(bits);
    }
    parsed.push_back({std::move(name), std::move(shape), std::move(data)});
  }
  const std::size_t body_end = r.position();
  const auto stored = r.get<std::uint32_t>("checksum");
  if (stored != crc32_of(bytes.first(body_end))) throw Error(ErrorKind::ChecksumMismatch, "CRC-32 footer mismatch");
  WeightArchive archive;
  for (auto& t : parsed) archive.add(std::move(t.name), std::move(t.shape), std::move(t.data));
  return archive;
}

void save_archive(const WeightArchive& archive, const std::filesystem::path& path) {
  const auto bytes = serialize_archive(archive);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "short write to " + path.string());
}

WeightArchive load_archive(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::FileNotFound, path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_archive(bytes);
}

}  // namespace cwnet
