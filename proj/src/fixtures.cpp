#include "cwnet/fixtures.hpp"

#include <functional>
#include <limits>

#include "cwnet/rng.hpp"

namespace cwnet {
namespace {

struct FixtureOp {
  const char* name;
  std::function<Image(const Image&, const WeightArchive&, const NetworkConfig&)> run;
  std::size_t (*channels)(const NetworkConfig&);
};

const std::vector<FixtureOp>& fixture_ops() {
  static const std::vector<FixtureOp> ops{
      {"network_forward",
       [](const Image& x, const WeightArchive& w, const NetworkConfig& cfg) { return network_forward(x, w, cfg); },
       [](const NetworkConfig&) -> std::size_t { return 3; }},
      {"hfrb_forward",
       [](const Image& x, const WeightArchive& w, const NetworkConfig& cfg) { return hfrb_forward(x, w, cfg, 0); },
       [](const NetworkConfig& cfg) { return cfg.stage_channels(0); }},
      {"hf_mamba_block",
       [](const Image& x, const WeightArchive& w, const NetworkConfig& cfg) {
         const auto blk = bind_hf_mamba(w, hfrb_prefix(0) + ".hf_h0", cfg.stage_channels(0), cfg);
         return hf_mamba_block(x, blk, {ScanAxis::Horizontal, true});
       },
       [](const NetworkConfig& cfg) { return cfg.stage_channels(0); }},
      {"lfeb_block",
       [](const Image& x, const WeightArchive& w, const NetworkConfig& cfg) {
         return lfeb_block(x, bind_lfeb(w, hfrb_prefix(0) + ".lf0", cfg.stage_channels(0)));
       },
       [](const NetworkConfig& cfg) { return cfg.stage_channels(0); }},
  };
  return ops;
}

}  // namespace

std::vector<FixtureResult> check_fixture(const WeightArchive& fixture, const WeightArchive& weights,
                                         const NetworkConfig& cfg) {
  std::vector<FixtureResult> results;
  for (const auto& op : fixture_ops()) {
    const std::string in_name = std::string(op.name) + ".input";
    if (!fixture.contains(in_name)) continue;
    const Image expected = fixture.image(std::string(op.name) + ".output");
    const Image actual = op.run(fixture.image(in_name), weights, cfg);
    FixtureResult r{op.name, 0.0, false};
    if (actual.same_shape(expected)) {
      r.max_abs_error = max_abs_diff(actual, expected);
      r.passed = r.max_abs_error <= kFixtureTolerance;
    } else {
      r.max_abs_error = std::numeric_limits<double>::infinity();
    }
    results.push_back(r);
  }
  return results;
}

WeightArchive make_fixture(const WeightArchive& weights, const NetworkConfig& cfg, std::size_t size,
                           std::uint64_t seed) {
  WeightArchive fixture;
  SplitMix64 rng(seed);
  for (const auto& op : fixture_ops()) {
    Image probe(size, size, op.channels(cfg));
    for (float& v : probe.values()) v = static_cast<float>(rng.uniform());
    fixture.add_image(std::string(op.name) + ".input", probe);
    fixture.add_image(std::string(op.name) + ".output", op.run(probe, weights, cfg));
  }
  return fixture;
}

}  // namespace cwnet
