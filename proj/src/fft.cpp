#include "cwnet/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace cwnet::fft {
namespace {

// Planning is not thread-safe in FFTW; execution with the new-array
// interface is. Plans are created once per (height, width, sign) and kept
// for the process lifetime.
fftw_plan plan_for(std::size_t height, std::size_t width, int sign) {
  static std::mutex mutex;
  static std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  const auto key = std::make_tuple(height, width, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  auto* buf = fftw_alloc_complex(height * width);
  fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width), buf, buf, sign, FFTW_ESTIMATE);
  fftw_free(buf);
  if (plan == nullptr) throw std::runtime_error("fftw planning failed");
  plans.emplace(key, plan);
  return plan;
}

void run(std::vector<std::complex<double>>& data, std::size_t height, std::size_t width, int sign) {
  if (data.size() != height * width) throw std::invalid_argument("fft size mismatch");
  if (data.empty()) return;
  const fftw_plan plan = plan_for(height, width, sign);
  // std::vector storage may not meet FFTW's SIMD alignment; go through an
  // fftw-allocated buffer so execution matches the planned alignment.
  auto* buf = fftw_alloc_complex(data.size());
  std::copy(data.begin(), data.end(), reinterpret_cast<std::complex<double>*>(buf));
  fftw_execute_dft(plan, buf, buf);
  std::copy_n(reinterpret_cast<std::complex<double>*>(buf), data.size(), data.begin());
  fftw_free(buf);
}

}  // namespace

void forward_2d(std::vector<std::complex<double>>& data, std::size_t height, std::size_t width) {
  run(data, height, width, FFTW_FORWARD);
}

void inverse_2d(std::vector<std::complex<double>>& data, std::size_t height, std::size_t width) {
  run(data, height, width, FFTW_BACKWARD);
  const double norm = 1.0 / static_cast<double>(height * width);
  for (auto& v : data) v *= norm;
}

}  // namespace cwnet::fft
