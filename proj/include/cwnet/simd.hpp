#pragma once

#include <cstddef>
#include <string_view>

// Hot float loops shared by the convolution, projection and metric code.
// Each kernel has a scalar reference and optional AVX2 / NEON variants; the
// table is picked once at startup from CPU features, or forced with
// CWNET_SIMD=scalar.

namespace cwnet::simd {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  // y[i] += a * x[i]
  void (*axpy)(float* y, const float* x, float a, std::size_t n) noexcept;
  // y[i] += a[i] * b[i]
  void (*fmadd)(float* y, const float* a, const float* b, std::size_t n) noexcept;
  // out[i] = a[i] * b[i]
  void (*mul)(float* out, const float* a, const float* b, std::size_t n) noexcept;
  float (*dot)(const float* a, const float* b, std::size_t n) noexcept;
  // sum (a[i] - b[i])^2 accumulated in double
  double (*sq_diff_sum)(const float* a, const float* b, std::size_t n) noexcept;
};

const KernelTable& scalar_kernels() noexcept;
/// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;

const KernelTable& kernels() noexcept;
Isa active_isa() noexcept;
std::string_view isa_name(Isa isa) noexcept;

inline void axpy(float* y, const float* x, float a, std::size_t n) noexcept { kernels().axpy(y, x, a, n); }
inline void fmadd(float* y, const float* a, const float* b, std::size_t n) noexcept {
  kernels().fmadd(y, a, b, n);
}
inline void mul(float* out, const float* a, const float* b, std::size_t n) noexcept { kernels().mul(out, a, b, n); }
inline float dot(const float* a, const float* b, std::size_t n) noexcept { return kernels().dot(a, b, n); }
inline double sq_diff_sum(const float* a, const float* b, std::size_t n) noexcept {
  return kernels().sq_diff_sum(a, b, n);
}

}  // namespace cwnet::simd
