#include "cwnet/simd.hpp"

namespace cwnet::simd {
namespace {

void axpy_scalar(float* y, const float* x, float a, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void fmadd_scalar(float* y, const float* a, const float* b, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] += a[i] * b[i];
}

void mul_scalar(float* out, const float* a, const float* b, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

float dot_scalar(const float* a, const float* b, std::size_t n) noexcept {
  float acc = 0.0f;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sq_diff_sum_scalar(const float* a, const float* b, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{axpy_scalar, fmadd_scalar, mul_scalar, dot_scalar, sq_diff_sum_scalar};
  return table;
}

}  // namespace cwnet::simd
