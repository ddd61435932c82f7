#include "cwnet/ssm.hpp"

#include <algorithm>

#include "cwnet/ops.hpp"
#include "cwnet/parallel.hpp"
#include "cwnet/simd.hpp"

namespace cwnet {
namespace {

// softplus never returns 0 mathematically; keep it representable.
constexpr double kMinDelta = 1e-20;

void check(std::span<const float> s, std::size_t expected, const char* what) {
  if (s.size() != expected) {
    throw Error(ErrorKind::ShapeMismatch, std::string(what) + ": expected " + std::to_string(expected) +
                                              " values, got " + std::to_string(s.size()));
  }
}

struct StepParams {
  std::vector<double> delta;  // (length, channels)
  std::vector<double> b;      // (length, state)
  std::vector<double> c;      // (length, state)
};

StepParams project_steps(const float* seq, std::size_t length, const SsmParams& p) {
  const std::size_t e = p.channels;
  const std::size_t n = p.state_dim;
  StepParams s{std::vector<double>(length * e), std::vector<double>(length * n), std::vector<double>(length * n)};
  for (std::size_t t = 0; t < length; ++t) {
    const float* x = seq + t * e;
    for (std::size_t c = 0; c < e; ++c) {
      const double z = static_cast<double>(simd::dot(p.delta_weight.data() + c * e, x, e)) + p.delta_bias[c];
      s.delta[t * e + c] = std::max(softplus(z), kMinDelta);
    }
    for (std::size_t k = 0; k < n; ++k) {
      s.b[t * n + k] = simd::dot(p.b_proj.data() + k * e, x, e);
      s.c[t * n + k] = simd::dot(p.c_proj.data() + k * e, x, e);
    }
  }
  return s;
}

// Scans `length` steps of the (length, channels) sequence. When `reverse`
// is set, step t reads input length-1-t and writes output length-1-t.
// Outputs are added into `out`.
void scan(const float* seq, std::size_t length, const SsmParams& p, bool reverse, float* out) {
  const std::size_t e = p.channels;
  const std::size_t n = p.state_dim;
  std::vector<float> ordered;
  const float* src = seq;
  if (reverse) {
    ordered.resize(length * e);
    for (std::size_t t = 0; t < length; ++t) std::copy_n(seq + (length - 1 - t) * e, e, ordered.data() + t * e);
    src = ordered.data();
  }
  const StepParams steps = project_steps(src, length, p);

  parallel_for(e, [&](std::size_t c) {
    std::vector<double> a(n);
    for (std::size_t k = 0; k < n; ++k) a[k] = -std::exp(static_cast<double>(p.a_log[c * n + k]));
    std::vector<double> h(n, 0.0);
    const double d = p.d_ff[c];
    for (std::size_t t = 0; t < length; ++t) {
      const double x = src[t * e + c];
      const double delta = steps.delta[t * e + c];
      double y = d * x;
      for (std::size_t k = 0; k < n; ++k) {
        const ZohResult z = discretize_zoh(a[k], steps.b[t * n + k], delta);
        h[k] = z.a_bar * h[k] + z.b_bar * x;
        y += steps.c[t * n + k] * h[k];
      }
      const std::size_t dst = reverse ? length - 1 - t : t;
      out[dst * e + c] += static_cast<float>(y);
    }
  });
}

}  // namespace

void SsmParams::validate() const {
  if (channels == 0 || state_dim == 0) throw Error(ErrorKind::ShapeMismatch, "SSM needs channels and state > 0");
  check(a_log, channels * state_dim, "ssm a_log");
  check(delta_weight, channels * channels, "ssm delta weight");
  check(delta_bias, channels, "ssm delta bias");
  check(b_proj, state_dim * channels, "ssm B projection");
  check(c_proj, state_dim * channels, "ssm C projection");
  check(d_ff, channels, "ssm feedthrough");
}

double softplus(double v) noexcept {
  // log(1 + e^v) without overflow for large v
  return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
}

Image selective_scan_1d(const Image& sequence, const SsmParams& p) {
  p.validate();
  if (sequence.empty() || sequence.pixels() == 0) throw Error(ErrorKind::EmptySequence, "selective scan of empty input");
  if (sequence.channels() != p.channels) {
    throw Error(ErrorKind::ShapeMismatch, "sequence has " + std::to_string(sequence.channels()) + " channels, SSM " +
                                              std::to_string(p.channels));
  }
  Image out(1, sequence.pixels(), p.channels);
  scan(sequence.values().data(), sequence.pixels(), p, false, out.values().data());
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> scan_order(std::size_t height, std::size_t width, ScanAxis axis) {
  std::vector<std::pair<std::size_t, std::size_t>> order;
  order.reserve(height * width);
  switch (axis) {
    case ScanAxis::Horizontal:
      for (std::size_t r = 0; r < height; ++r)
        for (std::size_t c = 0; c < width; ++c) order.emplace_back(r, c);
      break;
    case ScanAxis::Vertical:
      for (std::size_t c = 0; c < width; ++c)
        for (std::size_t r = 0; r < height; ++r) order.emplace_back(r, c);
      break;
    case ScanAxis::Diagonal:
      if (height == 0 || width == 0) break;
      for (std::size_t s = 0; s + 1 < height + width; ++s) {
        const std::size_t r_lo = s >= width ? s - width + 1 : 0;
        const std::size_t r_hi = std::min(s, height - 1);
        for (std::size_t r = r_lo; r <= r_hi; ++r) order.emplace_back(r, s - r);
      }
      break;
  }
  return order;
}

Image directional_2d_ssm(const Image& x, ScanDirection dir, const SsmParams& p) {
  p.validate();
  if (x.empty()) throw Error(ErrorKind::EmptySequence, "directional scan of empty image");
  if (x.channels() != p.channels) throw Error(ErrorKind::ShapeMismatch, "directional scan channel mismatch");
  const std::size_t e = x.channels();
  const auto order = scan_order(x.height(), x.width(), dir.axis);
  const std::size_t length = order.size();

  std::vector<float> seq(length * e);
  for (std::size_t t = 0; t < length; ++t) std::copy_n(x.pixel(order[t].first, order[t].second), e, seq.data() + t * e);
  std::vector<float> ys(length * e, 0.0f);
  scan(seq.data(), length, p, false, ys.data());
  if (dir.bidirectional) scan(seq.data(), length, p, true, ys.data());

  Image out(x.height(), x.width(), e);
  for (std::size_t t = 0; t < length; ++t) std::copy_n(ys.data() + t * e, e, out.pixel(order[t].first, order[t].second));
  return out;
}

Image hf_mamba_block(const Image& x, const HfMambaWeights& w, ScanDirection dir) {
  const std::size_t c = w.channels;
  const std::size_t e = w.inner;
  if (x.channels() != c) {
    throw Error(ErrorKind::ShapeMismatch, "hf_mamba_block: input has " + std::to_string(x.channels()) +
                                              " channels, weights " + std::to_string(c));
  }
  if (w.ssm.channels != e) throw Error(ErrorKind::ShapeMismatch, "hf_mamba_block: SSM width mismatch");

  const Image u = ops::layer_norm(x, w.ln1_weight, w.ln1_bias);
  const Image xz = ops::pointwise(u, w.in_proj_weight, w.in_proj_bias, 2 * e);
  Image xs = ops::depthwise_conv(slice_channels(xz, 0, e), w.dw_weight, w.dw_bias, 3);
  ops::silu_inplace(xs);
  Image gate = slice_channels(xz, e, e);
  ops::silu_inplace(gate);
  const Image scanned = directional_2d_ssm(xs, dir, w.ssm);
  Image v = ops::pointwise(ops::multiply(scanned, gate), w.out_proj_weight, w.out_proj_bias, c);
  add_inplace(v, x);

  const Image g = ops::layer_norm(v, w.ln2_weight, w.ln2_bias);
  Image out = ops::pointwise(ops::simple_gate(ops::pointwise(g, w.ffn_in_weight, w.ffn_in_bias, 2 * c)),
                             w.ffn_out_weight, w.ffn_out_bias, c);
  add_inplace(out, v);
  return out;
}

}  // namespace cwnet
