#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include "cwnet/archive.hpp"
#include "cwnet/network.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cwnet;

namespace {

std::uint32_t crc32_bitwise(const std::vector<std::uint8_t>& bytes, std::size_t n) {
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < n; ++i) {
    crc ^= bytes[i];
    for (int k = 0; k < 8; ++k) crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
  }
  return ~crc;
}

template <class T>
void put(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
}

ErrorKind kind_of(const std::vector<std::uint8_t>& bytes) {
  try {
    deserialize_archive(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

NetworkConfig tiny_config() {
  NetworkConfig cfg;
  cfg.base_channels = 4;
  cfg.lf_blocks = {1, 1, 1, 1, 1};
  cfg.hf_blocks = {1, 1, 1, 1, 1};
  cfg.state_dim = 4;
  return cfg;
}

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("default configuration") {
    const NetworkConfig cfg;
    CHECK(cfg.stages() == 5);
    CHECK(cfg.downsamples() == 2);
    CHECK(cfg.stage_channels(0) == 16);
    CHECK(cfg.stage_channels(1) == 32);
    CHECK(cfg.stage_channels(2) == 64);
    CHECK(cfg.stage_channels(3) == 32);
    CHECK(cfg.stage_channels(4) == 16);
    CHECK(cfg.size_multiple() == 64);
    NetworkConfig bad;
    bad.hf_blocks = {1, 2};
    CHECK_THROWS_AS(bad.validate(), Error);
  }

  TEST_CASE("parameter count is pinned and inside the budget") {
    const NetworkConfig cfg;
    const std::size_t n = parameter_count(cfg);
    CHECK(n == 1051011);
    CHECK(n >= 860000);
    CHECK(n <= 1600000);
    const auto layout = weight_layout(cfg);
    CHECK(layout.size() == 716);
    std::set<std::string> names;
    std::size_t total = 0;
    for (const auto& t : layout) {
      names.insert(t.name);
      std::size_t c = 1;
      for (auto d : t.shape) c *= d;
      total += c;
    }
    CHECK(names.size() == layout.size());
    CHECK(total == n);
    CHECK(names.contains("stem.weight"));
    CHECK(names.contains("stage2.hfrb0.hf_d1.ssm.a_log"));
    CHECK(names.contains("stage2.hfrb0.lf3.ffc2.weight"));
    CHECK(names.contains("stage0.hfrb0.fe.wtconv.level2"));
    CHECK(random_init(cfg, 1).parameter_count() == n);
  }

  TEST_CASE("random init is deterministic and stable") {
    const NetworkConfig cfg = tiny_config();
    const auto a = random_init(cfg, 5), b = random_init(cfg, 5), c = random_init(cfg, 6);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    for (const auto& t : a.tensors()) {
      if (t.name.ends_with("ssm.a_log")) {
        for (float v : t.data) {
          const double A = -std::exp(static_cast<double>(v));
          CHECK(A >= -1.0 - 1e-6);
          CHECK(A <= -0.5 + 1e-6);
        }
      }
      if (t.name.ends_with(".bias")) {
        for (float v : t.data) CHECK(v == 0.0f);
      }
    }
  }

  TEST_CASE("archive byte layout") {
    WeightArchive a;
    a.add("ab", {2}, {1.0f, -2.5f});
    const auto bytes = serialize_archive(a);
    std::vector<std::uint8_t> want{'C', 'W', 'N', 'T'};
    put<std::uint32_t>(want, 1);
    put<std::uint64_t>(want, 1);
    put<std::uint16_t>(want, 2);
    want.push_back('a');
    want.push_back('b');
    want.push_back(1);
    put<std::uint64_t>(want, 2);
    put<std::uint32_t>(want, std::bit_cast<std::uint32_t>(1.0f));
    put<std::uint32_t>(want, std::bit_cast<std::uint32_t>(-2.5f));
    put<std::uint32_t>(want, crc32_bitwise(want, want.size()));
    CHECK(bytes == want);
  }

  TEST_CASE("archive roundtrip is bit exact") {
    const auto dir = testutil::scratch("archive");
    const auto a = random_init(tiny_config(), 9);
    save_archive(a, dir / "w.cwt");
    const auto b = load_archive(dir / "w.cwt");
    CHECK(a == b);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.tensors()[i].name == b.tensors()[i].name);
      CHECK(std::memcmp(a.tensors()[i].data.data(), b.tensors()[i].data.data(), a.tensors()[i].data.size() * 4) == 0);
    }
    save_archive(b, dir / "w2.cwt");
    CHECK(testutil::read_bytes(dir / "w.cwt") == testutil::read_bytes(dir / "w2.cwt"));
  }

  TEST_CASE("corrupted archives are rejected") {
    WeightArchive a;
    a.add("x", {2, 3}, std::vector<float>(6, 0.25f));
    a.add("y", {4}, std::vector<float>(4, -1.0f));
    const auto good = serialize_archive(a);

    auto bad_magic = good;
    std::memcpy(bad_magic.data(), "XXXX", 4);
    CHECK(kind_of(bad_magic) == ErrorKind::BadMagic);

    auto bad_version = good;
    bad_version[4] = 2;
    CHECK(kind_of(bad_version) == ErrorKind::UnsupportedVersion);

    for (std::size_t cut : {std::size_t{2}, std::size_t{10}, std::size_t{30}, good.size() - 10, good.size() - 1}) {
      CHECK(kind_of(std::vector<std::uint8_t>(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut))) ==
            ErrorKind::Truncated);
    }
    for (std::size_t pos : {std::size_t{40}, good.size() - 8, good.size() - 2}) {
      auto flipped = good;
      flipped[pos] ^= 0x40;
      CHECK(kind_of(flipped) == ErrorKind::ChecksumMismatch);
    }
    try {
      load_archive("/nonexistent/w.cwt");
      FAIL("expected FileNotFound");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::FileNotFound);
    }
  }

  TEST_CASE("archive container rules") {
    WeightArchive a;
    a.add("t", {2}, {1, 2});
    CHECK_THROWS_AS(a.add("t", {1}, {3}), Error);
    CHECK_THROWS_AS(a.add("nan", {1}, {std::nanf("")}), Error);
    CHECK_THROWS_AS(a.add("inf", {1}, {INFINITY}), Error);
    CHECK_THROWS_AS(a.add("shape", {3}, {1, 2}), Error);
    try {
      a.get("missing");
      FAIL("expected WeightMissing");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::WeightMissing);
    }
    try {
      a.view("t", {1, 2});
      FAIL("expected ShapeMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ShapeMismatch);
    }
    CHECK(a.view("t", {2})[1] == 2.0f);
    const Image img = oracle::random_image(2, 3, 2, 1);
    a.add_image("img", img);
    CHECK(a.image("img") == img);
    CHECK(a.parameter_count() == 14);
  }

  TEST_CASE("zero weights make the network the identity") {
    const NetworkConfig cfg = tiny_config();
    const auto w = zero_init(cfg);
    for (auto [h, wd] : {std::pair<std::size_t, std::size_t>{64, 64}, {37, 50}}) {
      const Image x = oracle::random_image(h, wd, 3, h);
      CHECK(network_forward(x, w, cfg) == x);
    }
    const Image big = oracle::random_image(32, 32, 3, 1);
    CHECK(network_forward(big, zero_init(NetworkConfig{}), NetworkConfig{}) == big);
  }

  TEST_CASE("zero-weight hfrb composes the zero-weight submodule contracts") {
    const NetworkConfig cfg = tiny_config();
    const auto w = zero_init(cfg);
    const Image x = oracle::random_image(16, 16, 4, 3, -1, 1);
    // every branch output vanishes, and the block has no outer residual
    CHECK(hfrb_forward(x, w, cfg, 0) == Image(16, 16, 4));
  }

  TEST_CASE("random weights give finite, shape-preserving output") {
    const NetworkConfig cfg = tiny_config();
    const auto w = random_init(cfg, 17);
    for (auto [h, wd] : {std::pair<std::size_t, std::size_t>{32, 32}, {40, 72}, {65, 33}}) {
      const Image x = oracle::random_image(h, wd, 3, h * wd);
      const Image y = network_forward(x, w, cfg);
      CHECK(y.same_shape(x));
      CHECK(y.all_finite());
      CHECK(network_forward(x, w, cfg) == y);
    }
    const Image s = oracle::random_image(32, 32, 16, 4, -1, 1);
    const auto dw = random_init(NetworkConfig{}, 3);
    const Image hs = hfrb_forward(s, dw, NetworkConfig{}, 0);
    CHECK(hs.same_shape(s));
    CHECK(hs.all_finite());
    CHECK_THROWS_AS(network_forward(Image(32, 32, 1), w, cfg), Error);
  }

  TEST_CASE("extract_features returns the bottleneck") {
    const NetworkConfig cfg;
    const auto w = random_init(cfg, 2);
    const Image x = oracle::random_image(64, 96, 3, 8);
    const Image f = extract_features(x, w, cfg);
    CHECK(f.height() == 16);
    CHECK(f.width() == 24);
    CHECK(f.channels() == 64);
    CHECK(extract_features(x, w, cfg) == f);
  }

  TEST_CASE("missing weights are named") {
    const NetworkConfig cfg = tiny_config();
    const auto full = random_init(cfg, 1);
    WeightArchive partial;
    for (const auto& t : full.tensors())
      if (t.name != "stage1.hfrb0.lf0.expand.weight") partial.add(t.name, t.shape, t.data);
    try {
      network_forward(oracle::random_image(32, 32, 3, 1), partial, cfg);
      FAIL("expected WeightMissing");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::WeightMissing);
      CHECK(std::string(e.what()).find("stage1.hfrb0.lf0.expand.weight") != std::string::npos);
    }
  }
}
