#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "cwnet/ops.hpp"
#include "cwnet/ssm.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cwnet;

namespace {

struct OwnedSsm {
  std::size_t e, n;
  std::vector<float> a_log, dt_w, dt_b, b_w, c_w, d;

  SsmParams bind() const { return {e, n, a_log, dt_w, dt_b, b_w, c_w, d}; }
  std::vector<double> naive(const std::vector<float>& x, std::size_t t) const {
    return oracle::naive_scan(x, t, e, n, a_log, dt_w, dt_b, b_w, c_w, d);
  }
};

OwnedSsm random_ssm(std::size_t e, std::size_t n, std::uint64_t seed) {
  return {e,
          n,
          oracle::random_vector(e * n, seed, -1.0f, 1.0f),
          oracle::random_vector(e * e, seed + 1, -0.5f, 0.5f),
          oracle::random_vector(e, seed + 2, -1.0f, 0.5f),
          oracle::random_vector(n * e, seed + 3, -0.5f, 0.5f),
          oracle::random_vector(n * e, seed + 4, -0.5f, 0.5f),
          oracle::random_vector(e, seed + 5, -1.0f, 1.0f)};
}

bool close(double got, double want, double tol) { return std::abs(got - want) <= tol * std::max(1.0, std::abs(want)); }

// Gather along the scan order, run the naive recurrence forward and on the
// reversed sequence, sum, scatter back.
Image gather_scan_scatter(const Image& x, ScanAxis axis, bool bidir, const OwnedSsm& p) {
  std::vector<std::pair<std::size_t, std::size_t>> order;
  const std::size_t h = x.height(), w = x.width();
  if (axis == ScanAxis::Horizontal) {
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c) order.emplace_back(r, c);
  } else if (axis == ScanAxis::Vertical) {
    for (std::size_t c = 0; c < w; ++c)
      for (std::size_t r = 0; r < h; ++r) order.emplace_back(r, c);
  } else {
    for (std::size_t s = 0; s + 2 <= h + w; ++s)
      for (std::size_t r = 0; r < h; ++r)
        if (s >= r && s - r < w) order.emplace_back(r, s - r);
  }
  const std::size_t t = order.size(), e = x.channels();
  std::vector<float> seq, rev;
  for (const auto& [r, c] : order)
    for (std::size_t k = 0; k < e; ++k) seq.push_back(x.at(r, c, k));
  for (std::size_t i = t; i-- > 0;)
    for (std::size_t k = 0; k < e; ++k) rev.push_back(seq[i * e + k]);
  const auto fwd = p.naive(seq, t);
  const auto bwd = p.naive(rev, t);
  Image out(h, w, e);
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t k = 0; k < e; ++k) {
      double v = fwd[i * e + k];
      if (bidir) v += bwd[(t - 1 - i) * e + k];
      out.at(order[i].first, order[i].second, k) = static_cast<float>(v);
    }
  return out;
}

}  // namespace

TEST_SUITE("ssm") {
  TEST_CASE("zoh closed forms") {
    const auto z = discretize_zoh(-1.0, 2.0, std::numbers::ln2);
    CHECK(std::abs(z.a_bar - 0.5) < 1e-12);
    CHECK(std::abs(z.b_bar - 1.0) < 1e-12);
    const auto s = discretize_zoh(1e-12, 1.0, 0.5);
    CHECK(s.a_bar == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.b_bar == doctest::Approx(0.5).epsilon(1e-12));
    for (double d : {0.0, -1e-3}) {
      try {
        discretize_zoh(-1.0, 1.0, d);
        FAIL("expected NonPositiveDelta");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonPositiveDelta);
      }
    }
  }

  TEST_CASE("zoh small-step limits") {
    for (double delta : {1e-3, 1e-4, 1e-5})
      for (double a : {-0.05, -0.5, -1.0, -3.0, -10.0})
        for (double b : {-2.0, 0.3, 1.0, 5.0}) {
          const auto z = discretize_zoh(a, b, delta);
          CHECK(std::abs(z.a_bar - (1.0 + delta * a)) <= 2.0 * (delta * a) * (delta * a));
          CHECK(std::abs(z.b_bar - delta * b) <= std::abs(a) * delta * delta * std::abs(b));
        }
  }

  TEST_CASE("zoh is stable for negative a") {
    for (double a : {-1e-6, -0.1, -1.0, -100.0})
      for (double delta : {1e-6, 0.1, 1.0, 50.0}) {
        const auto z = discretize_zoh(a, 1.0, delta);
        CHECK(z.a_bar < 1.0);
        CHECK(z.a_bar >= 0.0);
      }
  }

  TEST_CASE("softplus is positive and overflow-free") {
    CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
    CHECK(softplus(1000.0) == doctest::Approx(1000.0));
    CHECK(softplus(-50.0) > 0.0);
    CHECK(std::isfinite(softplus(1e6)));
  }

  TEST_CASE("single step unrolls by hand") {
    const OwnedSsm p = random_ssm(3, 2, 7);
    const auto x = oracle::random_vector(3, 8);
    const Image y = selective_scan_1d(Image(1, 1, 3, x), p.bind());
    for (std::size_t c = 0; c < 3; ++c) {
      double dz = p.dt_b[c];
      for (std::size_t j = 0; j < 3; ++j) dz += static_cast<double>(p.dt_w[c * 3 + j]) * x[j];
      const double delta = std::log1p(std::exp(dz));
      double want = static_cast<double>(p.d[c]) * x[c];
      for (std::size_t k = 0; k < 2; ++k) {
        double bk = 0, ck = 0;
        for (std::size_t j = 0; j < 3; ++j) {
          bk += static_cast<double>(p.b_w[k * 3 + j]) * x[j];
          ck += static_cast<double>(p.c_w[k * 3 + j]) * x[j];
        }
        const double a = -std::exp(static_cast<double>(p.a_log[c * 2 + k]));
        want += ck * ((std::exp(delta * a) - 1.0) / a * bk) * x[c];
      }
      CHECK(close(y.at(0, 0, c), want, 1e-6));
    }
  }

  TEST_CASE("integrator limit accumulates the input") {
    // Channel 1 is held at 1 and is the only input to the B and C projections,
    // so B_t = C_t = 1; a_log = -40 puts A inside the small-a branch.
    const std::size_t t = 12;
    const float z = 0.3f;
    OwnedSsm p{2, 1, {-40.0f, -40.0f}, {0, 0, 0, 0}, {z, z}, {0.0f, 1.0f}, {0.0f, 1.0f}, {0.0f, 0.0f}};
    const auto xs = oracle::random_vector(t, 3);
    Image seq(1, t, 2);
    for (std::size_t i = 0; i < t; ++i) {
      seq.at(0, i, 0) = xs[i];
      seq.at(0, i, 1) = 1.0f;
    }
    const Image y = selective_scan_1d(seq, p.bind());
    const double delta = std::log1p(std::exp(static_cast<double>(z)));
    double cum = 0;
    for (std::size_t i = 0; i < t; ++i) {
      cum += xs[i];
      CHECK(close(y.at(0, i, 0), delta * cum, 1e-6));
    }
  }

  TEST_CASE("selective scan equals the naive recurrence on random cases") {
    std::mt19937_64 gen(2024);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t t = 1 + gen() % 32, e = 1 + gen() % 8, n = 1 + gen() % 8;
      const OwnedSsm p = random_ssm(e, n, 1000 + static_cast<std::uint64_t>(trial) * 10);
      const auto x = oracle::random_vector(t * e, 5000 + static_cast<std::uint64_t>(trial));
      const Image y = selective_scan_1d(Image(1, t, e, x), p.bind());
      const auto want = p.naive(x, t);
      for (std::size_t i = 0; i < t * e; ++i) {
        worst = std::max(worst, std::abs(y.values()[i] - want[i]) / std::max(1.0, std::abs(want[i])));
      }
    }
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("scan errors") {
    const OwnedSsm p = random_ssm(2, 2, 1);
    try {
      selective_scan_1d(Image(), p.bind());
      FAIL("expected EmptySequence");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptySequence);
    }
    CHECK_THROWS_AS(selective_scan_1d(Image(1, 3, 3), p.bind()), Error);
    SsmParams broken = p.bind();
    broken.d_ff = broken.d_ff.subspan(1);
    CHECK_THROWS_AS(selective_scan_1d(Image(1, 3, 2), broken), Error);
  }

  TEST_CASE("scan orders") {
    using P = std::vector<std::pair<std::size_t, std::size_t>>;
    CHECK(scan_order(2, 2, ScanAxis::Horizontal) == P{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK(scan_order(2, 2, ScanAxis::Vertical) == P{{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    CHECK(scan_order(2, 3, ScanAxis::Diagonal) == P{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {1, 2}});
    CHECK(scan_order(3, 2, ScanAxis::Diagonal) == P{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}, {2, 1}});
    for (std::size_t h = 1; h <= 16; ++h)
      for (std::size_t w = 1; w <= 16; ++w)
        for (auto axis : {ScanAxis::Horizontal, ScanAxis::Vertical, ScanAxis::Diagonal}) {
          const auto o = scan_order(h, w, axis);
          REQUIRE(o.size() == h * w);
          std::set<std::pair<std::size_t, std::size_t>> seen(o.begin(), o.end());
          CHECK(seen.size() == h * w);
          CHECK(seen.rbegin()->first < h);
          for (std::size_t i = 1; axis == ScanAxis::Diagonal && i < o.size(); ++i)
            CHECK(o[i].first + o[i].second >= o[i - 1].first + o[i - 1].second);
        }
  }

  TEST_CASE("directional scans reduce to the 1-D scan and to each other") {
    const OwnedSsm p = random_ssm(4, 3, 77);
    const Image row = oracle::random_image(1, 9, 4, 78, -1, 1);
    const Image a = directional_2d_ssm(row, {ScanAxis::Horizontal, false}, p.bind());
    CHECK(max_abs_diff(a, selective_scan_1d(row, p.bind())) == 0.0f);

    const Image x = oracle::random_image(5, 7, 4, 79, -1, 1);
    for (bool bidir : {false, true}) {
      const Image v = directional_2d_ssm(x, {ScanAxis::Vertical, bidir}, p.bind());
      const Image h = directional_2d_ssm(transpose(x), {ScanAxis::Horizontal, bidir}, p.bind());
      CHECK(max_abs_diff(v, transpose(h)) < 1e-6f);
    }
    for (auto axis : {ScanAxis::Horizontal, ScanAxis::Vertical, ScanAxis::Diagonal}) {
      CHECK(directional_2d_ssm(x, {axis, true}, p.bind()).same_shape(x));
    }
  }

  TEST_CASE("directional scan matches gather-scan-scatter oracle") {
    for (auto axis : {ScanAxis::Horizontal, ScanAxis::Vertical, ScanAxis::Diagonal})
      for (auto [h, w] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 5}, {6, 4}}) {
        const OwnedSsm p = random_ssm(3, 4, 90 + h * w);
        const Image x = oracle::random_image(h, w, 3, 91 + h, -1, 1);
        const Image got = directional_2d_ssm(x, {axis, true}, p.bind());
        const Image want = gather_scan_scatter(x, axis, true, p);
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(close(got.values()[i], want.values()[i], 1e-6));
      }
  }

  TEST_CASE("long scans stay finite for inputs bounded by one") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      OwnedSsm p = random_ssm(4, 8, 300 + s);
      p.a_log = oracle::random_vector(32, 400 + s, -6.0f, 4.0f);
      p.dt_b = oracle::random_vector(4, 500 + s, -8.0f, 8.0f);
      const Image x = oracle::random_image(1, 1024, 4, 600 + s, -1, 1);
      CHECK(selective_scan_1d(x, p.bind()).all_finite());
    }
  }
}

namespace {

struct OwnedMamba {
  std::size_t c, e, n;
  std::vector<float> ln1_w, ln1_b, in_w, in_b, dw_w, dw_b, out_w, out_b, ln2_w, ln2_b, ffn_in_w, ffn_in_b, ffn_out_w,
      ffn_out_b;
  OwnedSsm ssm;

  HfMambaWeights bind() const {
    HfMambaWeights w;
    w.channels = c;
    w.inner = e;
    w.ln1_weight = ln1_w;
    w.ln1_bias = ln1_b;
    w.in_proj_weight = in_w;
    w.in_proj_bias = in_b;
    w.dw_weight = dw_w;
    w.dw_bias = dw_b;
    w.ssm = ssm.bind();
    w.out_proj_weight = out_w;
    w.out_proj_bias = out_b;
    w.ln2_weight = ln2_w;
    w.ln2_bias = ln2_b;
    w.ffn_in_weight = ffn_in_w;
    w.ffn_in_bias = ffn_in_b;
    w.ffn_out_weight = ffn_out_w;
    w.ffn_out_bias = ffn_out_b;
    return w;
  }
};

OwnedMamba random_mamba(std::size_t c, std::size_t n, std::uint64_t s) {
  const std::size_t e = 2 * c;
  auto r = [&](std::size_t len, float lo = -0.4f, float hi = 0.4f) { return oracle::random_vector(len, s++, lo, hi); };
  OwnedMamba m{c, e, n, r(c, 0.8f, 1.2f), r(c), r(2 * e * c), r(2 * e), r(e * 9), r(e), r(c * e), r(c),
               r(c, 0.8f, 1.2f), r(c), r(2 * c * c), r(2 * c), r(c * c), r(c), random_ssm(e, n, s + 100)};
  return m;
}

Image ln_ref(const Image& x, const std::vector<float>& g, const std::vector<float>& b) {
  Image out(x.height(), x.width(), x.channels());
  const std::size_t c = x.channels();
  for (std::size_t p = 0; p < x.pixels(); ++p) {
    double m = 0, v = 0;
    for (std::size_t i = 0; i < c; ++i) m += x.values()[p * c + i];
    m /= static_cast<double>(c);
    for (std::size_t i = 0; i < c; ++i) v += (x.values()[p * c + i] - m) * (x.values()[p * c + i] - m);
    v /= static_cast<double>(c);
    for (std::size_t i = 0; i < c; ++i)
      out.values()[p * c + i] = static_cast<float>((x.values()[p * c + i] - m) / std::sqrt(v + 1e-5) * g[i] + b[i]);
  }
  return out;
}

Image linear_ref(const Image& x, const std::vector<float>& w, const std::vector<float>& b, std::size_t out_c) {
  Image out(x.height(), x.width(), out_c);
  const std::size_t c = x.channels();
  for (std::size_t p = 0; p < x.pixels(); ++p)
    for (std::size_t o = 0; o < out_c; ++o) {
      double acc = b[o];
      for (std::size_t i = 0; i < c; ++i) acc += static_cast<double>(w[o * c + i]) * x.values()[p * c + i];
      out.values()[p * out_c + o] = static_cast<float>(acc);
    }
  return out;
}

Image silu_ref(Image x) {
  for (float& v : x.values()) v = static_cast<float>(v / (1.0 + std::exp(-static_cast<double>(v))));
  return x;
}

Image mamba_ref(const Image& x, const OwnedMamba& m, ScanAxis axis) {
  const Image u = ln_ref(x, m.ln1_w, m.ln1_b);
  const Image xz = linear_ref(u, m.in_w, m.in_b, 2 * m.e);
  Image xs = slice_channels(xz, 0, m.e), z = slice_channels(xz, m.e, m.e);
  xs = oracle::depthwise(xs, m.dw_w, 3);
  for (std::size_t p = 0; p < xs.pixels(); ++p)
    for (std::size_t k = 0; k < m.e; ++k) xs.values()[p * m.e + k] += m.dw_b[k];
  xs = silu_ref(xs);
  z = silu_ref(z);
  Image y = gather_scan_scatter(xs, axis, true, m.ssm);
  for (std::size_t i = 0; i < y.size(); ++i) y.values()[i] *= z.values()[i];
  const Image v = add(linear_ref(y, m.out_w, m.out_b, m.c), x);
  const Image f = linear_ref(ln_ref(v, m.ln2_w, m.ln2_b), m.ffn_in_w, m.ffn_in_b, 2 * m.c);
  Image g(f.height(), f.width(), m.c);
  for (std::size_t p = 0; p < f.pixels(); ++p)
    for (std::size_t k = 0; k < m.c; ++k) g.values()[p * m.c + k] = f.values()[p * 2 * m.c + k] * f.values()[p * 2 * m.c + m.c + k];
  return add(linear_ref(g, m.ffn_out_w, m.ffn_out_b, m.c), v);
}

}  // namespace

TEST_SUITE("ssm") {
  TEST_CASE("hf-mamba block with zero inner projections is the identity") {
    OwnedMamba m = random_mamba(4, 4, 10);
    std::fill(m.out_w.begin(), m.out_w.end(), 0.0f);
    std::fill(m.out_b.begin(), m.out_b.end(), 0.0f);
    std::fill(m.ffn_out_w.begin(), m.ffn_out_w.end(), 0.0f);
    std::fill(m.ffn_out_b.begin(), m.ffn_out_b.end(), 0.0f);
    const Image x = oracle::random_image(6, 6, 4, 11, -1, 1);
    for (auto axis : {ScanAxis::Horizontal, ScanAxis::Vertical, ScanAxis::Diagonal}) {
      CHECK(hf_mamba_block(x, m.bind(), {axis, true}) == x);
    }
  }

  TEST_CASE("hf-mamba block maps zero to zero when biases vanish") {
    OwnedMamba m = random_mamba(4, 4, 20);
    for (auto* b : {&m.ln1_b, &m.in_b, &m.dw_b, &m.out_b, &m.ln2_b, &m.ffn_in_b, &m.ffn_out_b})
      std::fill(b->begin(), b->end(), 0.0f);
    const Image z(4, 6, 4);
    CHECK(hf_mamba_block(z, m.bind(), {ScanAxis::Diagonal, true}) == z);
  }

  TEST_CASE("hf-mamba block matches the composed reference") {
    for (auto axis : {ScanAxis::Horizontal, ScanAxis::Vertical, ScanAxis::Diagonal}) {
      const OwnedMamba m = random_mamba(8, 8, 30);
      const Image x = oracle::random_image(8, 8, 8, 31, -1, 1);
      const Image got = hf_mamba_block(x, m.bind(), {axis, true});
      CHECK(got.all_finite());
      CHECK(max_abs_diff(got, mamba_ref(x, m, axis)) < 1e-4f);
    }
    const OwnedMamba m = random_mamba(8, 8, 30);
    CHECK_THROWS_AS(hf_mamba_block(Image(4, 4, 6), m.bind(), {}), Error);
  }
}
