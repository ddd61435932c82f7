#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "cwnet/error.hpp"
#include "cwnet/tensor.hpp"

namespace cwnet {

struct ZohResult {
  double a_bar;
  double b_bar;
};

/// Below this |a| the input matrix uses its analytic limit b_bar = delta * b.
inline constexpr double kZohSmallA = 1e-8;

/// Zero-order-hold discretization of a scalar diagonal SSM entry:
/// a_bar = exp(delta a), b_bar = (exp(delta a) - 1) / a * b.
inline ZohResult discretize_zoh(double a, double b, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::NonPositiveDelta, "ZOH step must be positive");
  const double em1 = std::expm1(delta * a);
  if (std::abs(a) < kZohSmallA) return {em1 + 1.0, delta * b};
  return {em1 + 1.0, em1 / a * b};
}

/// Selective diagonal SSM over `channels` independent lanes with a shared
/// state of size `state_dim` per lane. All step parameters are projections
/// of the current input vector x_t:
///   delta_t = softplus(delta_weight x_t + delta_bias)   (channels)
///   B_t = b_proj x_t, C_t = c_proj x_t                    (state_dim)
///   A = -exp(a_log)                                       (channels, state_dim)
struct SsmParams {
  std::size_t channels = 0;
  std::size_t state_dim = 0;
  std::span<const float> a_log;         // (channels, state_dim)
  std::span<const float> delta_weight;  // (channels, channels)
  std::span<const float> delta_bias;    // (channels)
  std::span<const float> b_proj;        // (state_dim, channels)
  std::span<const float> c_proj;        // (state_dim, channels)
  std::span<const float> d_ff;          // (channels)

  void validate() const;
};

double softplus(double v) noexcept;

/// Runs h_t = A_bar_t h_{t-1} + B_bar_t x_t, y_t = C_t . h_t + d_ff x_t from
/// h_0 = 0 over a (1, length, channels) sequence. Throws EmptySequence.
Image selective_scan_1d(const Image& sequence, const SsmParams& p);

enum class ScanAxis { Horizontal, Vertical, Diagonal };

struct ScanDirection {
  ScanAxis axis = ScanAxis::Horizontal;
  bool bidirectional = true;
};

/// Horizontal: row-major. Vertical: column-major. Diagonal: anti-diagonals
/// by increasing row + col, each walked by increasing row.
std::vector<std::pair<std::size_t, std::size_t>> scan_order(std::size_t height, std::size_t width, ScanAxis axis);

/// Gathers x along scan_order, scans (and, if bidirectional, scans the
/// reversed sequence and sums), then scatters back.
Image directional_2d_ssm(const Image& x, ScanDirection dir, const SsmParams& p);

/// LN -> VSSM (+ residual) -> LN -> gated FFN (+ residual).
struct HfMambaWeights {
  std::size_t channels = 0;  // C
  std::size_t inner = 0;     // E, VSSM width
  std::span<const float> ln1_weight, ln1_bias;  // (C)
  std::span<const float> in_proj_weight;        // (2E, C)
  std::span<const float> in_proj_bias;          // (2E)
  std::span<const float> dw_weight;             // (E, 1, 3, 3)
  std::span<const float> dw_bias;               // (E)
  SsmParams ssm;                                // channels = E
  std::span<const float> out_proj_weight;       // (C, E)
  std::span<const float> out_proj_bias;         // (C)
  std::span<const float> ln2_weight, ln2_bias;  // (C)
  std::span<const float> ffn_in_weight;         // (2C, C)
  std::span<const float> ffn_in_bias;           // (2C)
  std::span<const float> ffn_out_weight;        // (C, C)
  std::span<const float> ffn_out_bias;          // (C)
};

/// VSSM(u) = out_proj( scan(SiLU(dw3x3(x_part))) * SiLU(z_part) ), where
/// (x_part, z_part) = in_proj(u). GFFN(g) = ffn_out(simple_gate(ffn_in(g))).
Image hf_mamba_block(const Image& x, const HfMambaWeights& w, ScanDirection dir);

}  // namespace cwnet
