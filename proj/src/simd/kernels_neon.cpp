#include "cwnet/simd.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace cwnet::simd {
namespace {

void axpy_neon(float* y, const float* x, float a, std::size_t n) noexcept {
  const float32x4_t va = vdupq_n_f32(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_f32(y + i, vfmaq_f32(vld1q_f32(y + i), va, vld1q_f32(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void fmadd_neon(float* y, const float* a, const float* b, std::size_t n) noexcept {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_f32(y + i, vfmaq_f32(vld1q_f32(y + i), vld1q_f32(a + i), vld1q_f32(b + i)));
  for (; i < n; ++i) y[i] += a[i] * b[i];
}

void mul_neon(float* out, const float* a, const float* b, std::size_t n) noexcept {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_f32(out + i, vmulq_f32(vld1q_f32(a + i), vld1q_f32(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

float dot_neon(const float* a, const float* b, std::size_t n) noexcept {
  float32x4_t acc = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = vfmaq_f32(acc, vld1q_f32(a + i), vld1q_f32(b + i));
  float total = vaddvq_f32(acc);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double sq_diff_sum_neon(const float* a, const float* b, std::size_t n) noexcept {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vcvt_f64_f32(vld1_f32(a + i)), vcvt_f64_f32(vld1_f32(b + i)));
    acc = vfmaq_f64(acc, d, d);
  }
  double total = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    total += d * d;
  }
  return total;
}

}  // namespace

const KernelTable* neon_kernels() noexcept {
  static const KernelTable table{axpy_neon, fmadd_neon, mul_neon, dot_neon, sq_diff_sum_neon};
  return &table;
}

}  // namespace cwnet::simd

#else

namespace cwnet::simd {
const KernelTable* neon_kernels() noexcept { return nullptr; }
}  // namespace cwnet::simd

#endif
