#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cwnet/archive.hpp"
#include "cwnet/feature_extraction.hpp"
#include "cwnet/lfeb.hpp"
#include "cwnet/ssm.hpp"
#include "cwnet/tensor.hpp"

namespace cwnet {

struct NetworkConfig {
  std::size_t base_channels = 16;
  std::vector<std::size_t> lf_blocks{1, 3, 4, 3, 1};
  std::vector<std::size_t> hf_blocks{1, 2, 2, 2, 1};
  std::size_t state_dim = 8;
  std::size_t vssm_expand = 2;
  WtConvConfig wtconv{};

  /// Throws InvalidArgument unless both block lists share one odd length.
  void validate() const;
  std::size_t stages() const noexcept { return lf_blocks.size(); }
  std::size_t downsamples() const noexcept { return stages() / 2; }
  std::size_t stage_channels(std::size_t stage) const noexcept;
  /// Input sides are reflect-padded up to a multiple of this.
  std::size_t size_multiple() const noexcept;
};

enum class InitKind { FanIn, Zero, One, NegLogDecay, FeedThrough };

struct TensorSpec {
  std::string name;
  std::vector<std::uint64_t> shape;
  InitKind init = InitKind::Zero;
  std::size_t fan_in = 0;
};

/// Every tensor the engine reads, in archive order.
std::vector<TensorSpec> weight_layout(const NetworkConfig& cfg);
std::size_t parameter_count(const NetworkConfig& cfg);

/// Fan-in-scaled uniform weights, zero biases, unit LayerNorm scales,
/// a_log drawn so A = -exp(a_log) lies in [-1, -0.5], feedthrough 1.
WeightArchive random_init(const NetworkConfig& cfg, std::uint64_t seed);
/// Every tensor of the layout filled with zeros.
WeightArchive zero_init(const NetworkConfig& cfg);

/// Weights of one HFRB, viewing into an archive that must outlive them.
struct HfrbWeights {
  FeBlockWeights fe;
  std::vector<HfMambaWeights> hf_h, hf_v, hf_d;
  std::vector<LfebWeights> lf;
};

std::string hfrb_prefix(std::size_t stage);
HfrbWeights bind_hfrb(const WeightArchive& archive, const NetworkConfig& cfg, std::size_t stage);
HfMambaWeights bind_hf_mamba(const WeightArchive& archive, const std::string& prefix, std::size_t channels,
                             const NetworkConfig& cfg);
LfebWeights bind_lfeb(const WeightArchive& archive, const std::string& prefix, std::size_t channels);

/// dwt2 -> FE -> per-band HF-Mamba stacks (H horizontal, V vertical, D
/// diagonal scans) -> idwt2 -> LFEB stack.
Image hfrb_forward(const Image& x, const HfrbWeights& w);
Image hfrb_forward(const Image& x, const WeightArchive& archive, const NetworkConfig& cfg, std::size_t stage);

/// Full enhancement pass on a 3-channel image; output is not clamped.
Image network_forward(const Image& img, const WeightArchive& archive, const NetworkConfig& cfg);

/// Stem, encoder and bottleneck only; returns the bottleneck activation of
/// shape (ceil(h / 2^d), ceil(w / 2^d), base * 2^d) with d downsamples.
Image extract_features(const Image& img, const WeightArchive& archive, const NetworkConfig& cfg);

}  // namespace cwnet
