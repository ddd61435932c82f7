#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cwnet/archive.hpp"
#include "cwnet/network.hpp"

// Golden-activation fixtures exchanged with the trainer. A fixture is a
// regular weight archive holding "<op>.input" / "<op>.output" image tensors
// (height, width, channels) for any subset of the ops below:
//   network_forward  full network on a 3-channel probe
//   hfrb_forward     HFRB of stage 0
//   hf_mamba_block   block stage0.hfrb0.hf_h0, horizontal bidirectional scan
//   lfeb_block       block stage0.hfrb0.lf0

namespace cwnet {

inline constexpr double kFixtureTolerance = 1e-4;

struct FixtureResult {
  std::string op;
  double max_abs_error = 0.0;
  bool passed = false;
};

/// Runs every op present in `fixture` against `weights`.
std::vector<FixtureResult> check_fixture(const WeightArchive& fixture, const WeightArchive& weights,
                                         const NetworkConfig& cfg);

/// Engine-side fixture for a random probe of the given spatial size.
WeightArchive make_fixture(const WeightArchive& weights, const NetworkConfig& cfg, std::size_t size,
                           std::uint64_t seed);

}  // namespace cwnet
