#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cwnet/tensor.hpp"

namespace cwnet {

struct NamedTensor {
  std::string name;
  std::vector<std::uint64_t> shape;
  std::vector<float> data;

  std::size_t element_count() const noexcept;
  std::string shape_string() const;
  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

/// Insertion-ordered name -> float32 tensor map shared by the engine and
/// the trainer. Names are unique and every value finite.
class WeightArchive {
 public:
  void add(std::string name, std::vector<std::uint64_t> shape, std::vector<float> data);
  void add_image(std::string name, const Image& img);

  bool contains(const std::string& name) const { return index_.contains(name); }
  const NamedTensor* find(const std::string& name) const;
  /// Throws WeightMissing.
  const NamedTensor& get(const std::string& name) const;
  /// Throws WeightMissing, or ShapeMismatch when the stored shape differs.
  std::span<const float> view(const std::string& name, const std::vector<std::uint64_t>& shape) const;
  /// Rank-3 (height, width, channels) tensor as an image.
  Image image(const std::string& name) const;

  const std::vector<NamedTensor>& tensors() const noexcept { return tensors_; }
  std::size_t size() const noexcept { return tensors_.size(); }
  std::size_t parameter_count() const noexcept;

  friend bool operator==(const WeightArchive& a, const WeightArchive& b) { return a.tensors_ == b.tensors_; }

 private:
  std::vector<NamedTensor> tensors_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::uint32_t kArchiveVersion = 1;

/// Little-endian layout:
///   "CWNT" | u32 version | u64 tensor_count |
///   per tensor: u16 name_len | name bytes | u8 rank | rank x u64 dims | f32 data |
///   u32 CRC-32 (IEEE) of every preceding byte.
std::vector<std::uint8_t> serialize_archive(const WeightArchive& archive);
/// Throws BadMagic, UnsupportedVersion, Truncated or ChecksumMismatch.
WeightArchive deserialize_archive(std::span<const std::uint8_t> bytes);

void save_archive(const WeightArchive& archive, const std::filesystem::path& path);
WeightArchive load_archive(const std::filesystem::path& path);

}  // namespace cwnet
