#include <cmath>

#include "cwnet/wavelet.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cwnet;

namespace {

double energy(const Image& x) {
  double s = 0;
  for (float v : x.values()) s += static_cast<double>(v) * v;
  return s;
}

WtConvWeights bind(std::size_t channels, std::size_t levels, std::size_t k, const std::vector<float>& base,
                   const std::vector<std::vector<float>>& lv) {
  WtConvWeights w;
  w.config = {levels, k};
  w.channels = channels;
  w.base = base;
  for (const auto& l : lv) w.level.emplace_back(l);
  return w;
}

}  // namespace

TEST_SUITE("wavelet") {
  TEST_CASE("hand example and its inverse") {
    const Image x(2, 2, 1, std::vector<float>{1, 2, 3, 4});
    const auto sb = dwt2(x);
    CHECK(sb.low.at(0, 0, 0) == 5.0f);
    CHECK(sb.horiz.at(0, 0, 0) == -1.0f);
    CHECK(sb.vert.at(0, 0, 0) == -2.0f);
    CHECK(sb.diag.at(0, 0, 0) == 0.0f);
    WaveletSubbands h{Image(1, 1, 1, 5.0f), Image(1, 1, 1, -1.0f), Image(1, 1, 1, -2.0f), Image(1, 1, 1, 0.0f)};
    CHECK(idwt2(h) == x);
  }

  TEST_CASE("constant image puts everything in the low band") {
    const auto sb = dwt2(Image(6, 4, 2, 0.3f));
    for (float v : sb.low.values()) CHECK(v == doctest::Approx(0.6f));
    for (const Image* b : {&sb.horiz, &sb.vert, &sb.diag})
      for (float v : b->values()) CHECK(v == 0.0f);
  }

  TEST_CASE("errors") {
    try {
      dwt2(Image(3, 4, 1));
      FAIL("expected OddDimension");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::OddDimension);
    }
    WaveletSubbands bad{Image(2, 2, 1), Image(2, 2, 1), Image(2, 3, 1), Image(2, 2, 1)};
    try {
      idwt2(bad);
      FAIL("expected ShapeMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ShapeMismatch);
    }
    CHECK(idwt2({Image(2, 2, 3), Image(2, 2, 3), Image(2, 2, 3), Image(2, 2, 3)}) == Image(4, 4, 3));
  }

  TEST_CASE("dwt2 matches the block oracle") {
    const Image x = oracle::random_image(10, 14, 3, 9);
    const auto sb = dwt2(x);
    const auto ref = oracle::haar(x);
    CHECK(max_abs_diff(sb.low, ref.l) < 1e-6f);
    CHECK(max_abs_diff(sb.horiz, ref.h) < 1e-6f);
    CHECK(max_abs_diff(sb.vert, ref.v) < 1e-6f);
    CHECK(max_abs_diff(sb.diag, ref.d) < 1e-6f);
  }

  TEST_CASE("linearity, energy and roundtrip properties") {
    for (std::uint64_t s = 0; s < 30; ++s) {
      const std::size_t h = 2 * (1 + s % 9), w = 2 * (1 + (s * 7) % 11), c = 1 + s % 4;
      const Image x = oracle::random_image(h, w, c, s), y = oracle::random_image(h, w, c, s + 99);
      const float alpha = 0.7f, beta = -1.3f;
      const auto lhs = dwt2(add(scale(x, alpha), scale(y, beta)));
      const auto sx = dwt2(x), sy = dwt2(y);
      CHECK(max_abs_diff(lhs.low, add(scale(sx.low, alpha), scale(sy.low, beta))) < 1e-6f);
      CHECK(max_abs_diff(lhs.horiz, add(scale(sx.horiz, alpha), scale(sy.horiz, beta))) < 1e-6f);
      CHECK(max_abs_diff(lhs.vert, add(scale(sx.vert, alpha), scale(sy.vert, beta))) < 1e-6f);
      CHECK(max_abs_diff(lhs.diag, add(scale(sx.diag, alpha), scale(sy.diag, beta))) < 1e-6f);

      const double e = energy(x);
      const double eb = energy(sx.low) + energy(sx.horiz) + energy(sx.vert) + energy(sx.diag);
      CHECK(std::abs(e - eb) / e < 1e-4);
      CHECK(max_abs_diff(idwt2(sx), x) < 1e-5f);
    }
  }

  TEST_CASE("wtconv with delta kernels at one level doubles the input") {
    const std::size_t c = 3, k = 5;
    std::vector<float> delta(c * k * k, 0.0f);
    for (std::size_t i = 0; i < c; ++i) delta[i * k * k + 12] = 1.0f;
    std::vector<float> lvl(4 * c * k * k, 0.0f);
    for (std::size_t i = 0; i < 4 * c; ++i) lvl[i * k * k + 12] = 1.0f;
    const Image x = oracle::random_image(8, 8, c, 3);
    const Image y = wtconv(x, bind(c, 1, k, delta, {lvl}));
    CHECK(max_abs_diff(y, scale(x, 2.0f)) < 1e-5f);
  }

  TEST_CASE("wtconv zero cases") {
    const std::size_t c = 2, k = 5;
    const std::vector<float> zb(c * k * k, 0.0f);
    const std::vector<std::vector<float>> zl(3, std::vector<float>(4 * c * k * k, 0.0f));
    const Image x = oracle::random_image(16, 16, c, 4);
    CHECK(wtconv(x, bind(c, 3, k, zb, zl)) == Image(16, 16, c));
    const auto rb = oracle::random_vector(c * k * k, 5);
    std::vector<std::vector<float>> rl;
    for (int l = 0; l < 3; ++l) rl.push_back(oracle::random_vector(4 * c * k * k, 6 + l));
    CHECK(wtconv(Image(16, 16, c), bind(c, 3, k, rb, rl)) == Image(16, 16, c));
    try {
      wtconv(Image(12, 12, c), bind(c, 3, k, rb, rl));
      FAIL("expected OddDimension");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::OddDimension);
    }
  }

  TEST_CASE("wtconv matches the nested-loop oracle") {
    for (std::size_t levels : {1u, 2u, 3u}) {
      const std::size_t c = 3, k = 5;
      const auto base = oracle::random_vector(c * k * k, 11 + levels);
      std::vector<std::vector<float>> lv;
      for (std::size_t l = 0; l < levels; ++l) lv.push_back(oracle::random_vector(4 * c * k * k, 20 + l + levels));
      const Image x = oracle::random_image(16, 16, c, 30 + levels);
      const Image got = wtconv(x, bind(c, levels, k, base, lv));
      const Image want = oracle::wtconv(x, base, lv, k);
      CHECK(max_abs_diff(got, want) < 1e-5f);
    }
    // non-square, 3x3 kernels
    const std::size_t c = 2, k = 3;
    const auto base = oracle::random_vector(c * k * k, 70);
    const std::vector<std::vector<float>> lv{oracle::random_vector(4 * c * k * k, 71),
                                             oracle::random_vector(4 * c * k * k, 72)};
    const Image x = oracle::random_image(8, 20, c, 73);
    CHECK(max_abs_diff(wtconv(x, bind(c, 2, k, base, lv)), oracle::wtconv(x, base, lv, k)) < 1e-5f);
  }
}
