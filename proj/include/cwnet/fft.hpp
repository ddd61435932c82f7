#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace cwnet::fft {

/// Full complex 2D DFT of a row-major height x width grid, in place.
/// Forward is unnormalized; inverse scales by 1 / (height * width).
void forward_2d(std::vector<std::complex<double>>& data, std::size_t height, std::size_t width);
void inverse_2d(std::vector<std::complex<double>>& data, std::size_t height, std::size_t width);

}  // namespace cwnet::fft
