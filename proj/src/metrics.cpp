#include "cwnet/metrics.hpp"

#include <cmath>
#include <vector>

#include "cwnet/simd.hpp"

namespace cwnet {

double mean_squared_error(const Image& test, const Image& reference) {
  require_same_shape(test, reference, "mse");
  if (test.empty()) throw Error(ErrorKind::ShapeMismatch, "mse of empty images");
  const double sum = simd::sq_diff_sum(test.values().data(), reference.values().data(), test.size());
  return sum / static_cast<double>(test.size());
}

double psnr_from_mse(double mse) noexcept {
  if (mse < kPsnrMseFloor) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

QualityScore psnr(const Image& test, const Image& reference) {
  return {psnr_from_mse(mean_squared_error(test, reference)), MetricKind::Psnr};
}

namespace {

std::vector<double> gaussian_taps(int size, double sigma) {
  std::vector<double> taps(static_cast<std::size_t>(size));
  const double centre = (size - 1) / 2.0;
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - centre;
    taps[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    total += taps[static_cast<std::size_t>(i)];
  }
  for (double& t : taps) t /= total;
  return taps;
}

// Separable "valid" filtering of one plane: out is (h-k+1) x (w-k+1).
std::vector<double> filter_valid(const std::vector<double>& plane, std::size_t h, std::size_t w,
                                 const std::vector<double>& taps) {
  const std::size_t k = taps.size();
  const std::size_t oh = h - k + 1;
  const std::size_t ow = w - k + 1;
  std::vector<double> rows(h * ow);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += taps[t] * plane[y * w + x + t];
      rows[y * ow + x] = acc;
    }
  }
  std::vector<double> out(oh * ow);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += taps[t] * rows[(y + t) * ow + x];
      out[y * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

QualityScore ssim(const Image& test, const Image& reference, const SsimOptions& opts) {
  require_same_shape(test, reference, "ssim");
  const auto win = static_cast<std::size_t>(opts.window);
  if (test.height() < win || test.width() < win) {
    throw Error(ErrorKind::ImageTooSmall, "ssim needs at least " + std::to_string(win) + " pixels per side, got " +
                                              test.shape_string());
  }
  const double c1 = (opts.k1 * opts.dynamic_range) * (opts.k1 * opts.dynamic_range);
  const double c2 = (opts.k2 * opts.dynamic_range) * (opts.k2 * opts.dynamic_range);
  const auto taps = gaussian_taps(opts.window, opts.sigma);
  const std::size_t h = test.height();
  const std::size_t w = test.width();
  const std::size_t n = h * w;

  double total = 0.0;
  std::size_t count = 0;
  std::vector<double> a(n), b(n), aa(n), bb(n), ab(n);
  for (std::size_t c = 0; c < test.channels(); ++c) {
    for (std::size_t p = 0; p < n; ++p) {
      a[p] = test.values()[p * test.channels() + c];
      b[p] = reference.values()[p * test.channels() + c];
      aa[p] = a[p] * a[p];
      bb[p] = b[p] * b[p];
      ab[p] = a[p] * b[p];
    }
    const auto mu_a = filter_valid(a, h, w, taps);
    const auto mu_b = filter_valid(b, h, w, taps);
    const auto e_aa = filter_valid(aa, h, w, taps);
    const auto e_bb = filter_valid(bb, h, w, taps);
    const auto e_ab = filter_valid(ab, h, w, taps);
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
      const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
      const double cov = e_ab[i] - mu_a[i] * mu_b[i];
      const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
      const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (var_a + var_b + c2);
      total += num / den;
    }
    count += mu_a.size();
  }
  return {total / static_cast<double>(count), MetricKind::Ssim};
}

}  // namespace cwnet
