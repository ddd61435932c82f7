#pragma once

#include "cwnet/tensor.hpp"

namespace cwnet {

enum class MetricKind { Psnr, Ssim };

struct QualityScore {
  double value = 0.0;
  MetricKind kind = MetricKind::Psnr;
};

/// PSNR returned for MSE below kPsnrMseFloor (identical images).
inline constexpr double kPsnrCap = 50.0;
inline constexpr double kPsnrMseFloor = 1e-10;

double mean_squared_error(const Image& test, const Image& reference);

/// 10 log10(1 / MSE) with peak 1.0, capped at kPsnrCap.
QualityScore psnr(const Image& test, const Image& reference);
double psnr_from_mse(double mse) noexcept;

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

/// Mean local SSIM over every fully contained window position and every
/// channel, Gaussian-weighted. Requires min(height, width) >= window.
QualityScore ssim(const Image& test, const Image& reference, const SsimOptions& opts = {});

}  // namespace cwnet
