#include "cwnet/fixtures.hpp"
#include "cwnet/network.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cwnet;

namespace {

NetworkConfig tiny() {
  NetworkConfig cfg;
  cfg.base_channels = 4;
  cfg.lf_blocks = {1, 1, 1, 1, 1};
  cfg.hf_blocks = {1, 1, 1, 1, 1};
  cfg.state_dim = 4;
  return cfg;
}

}  // namespace

TEST_SUITE("fixtures") {
  TEST_CASE("generated fixture passes against its own weights") {
    const auto cfg = tiny();
    const auto w = random_init(cfg, 1);
    const auto fx = make_fixture(w, cfg, 32, 2);
    for (const char* op : {"network_forward", "hfrb_forward", "hf_mamba_block", "lfeb_block"}) {
      CHECK(fx.contains(std::string(op) + ".input"));
      CHECK(fx.contains(std::string(op) + ".output"));
    }
    const auto results = check_fixture(fx, w, cfg);
    CHECK(results.size() == 4);
    for (const auto& r : results) {
      CHECK_MESSAGE(r.passed, r.op);
      CHECK(r.max_abs_error <= kFixtureTolerance);
    }
    CHECK(make_fixture(w, cfg, 32, 2) == fx);
  }

  TEST_CASE("fixture detects different weights") {
    const auto cfg = tiny();
    const auto fx = make_fixture(random_init(cfg, 1), cfg, 32, 2);
    const auto results = check_fixture(fx, random_init(cfg, 2), cfg);
    bool any_failed = false;
    for (const auto& r : results) any_failed = any_failed || !r.passed;
    CHECK(any_failed);
  }

  TEST_CASE("zero-weight contracts hold for fixture ops") {
    const auto cfg = tiny();
    const auto z = zero_init(cfg);
    const auto fx = make_fixture(z, cfg, 32, 4);
    CHECK(fx.image("network_forward.output") == fx.image("network_forward.input"));
    const Image h = fx.image("hfrb_forward.output");
    for (float v : h.values()) CHECK(v == 0.0f);
  }

  TEST_CASE("a fixture holding only some ops checks only those") {
    const auto cfg = tiny();
    const auto w = random_init(cfg, 3);
    const auto full = make_fixture(w, cfg, 32, 5);
    WeightArchive partial;
    for (const auto& t : full.tensors())
      if (t.name.starts_with("lfeb_block.")) partial.add(t.name, t.shape, t.data);
    const auto results = check_fixture(partial, w, cfg);
    REQUIRE(results.size() == 1);
    CHECK(results[0].op == "lfeb_block");
    CHECK(results[0].passed);
  }
}
