#include "cwnet/lfeb.hpp"

#include <algorithm>
#include <complex>
#include <vector>

#include "cwnet/fft.hpp"
#include "cwnet/ops.hpp"
#include "cwnet/parallel.hpp"

namespace cwnet {

Image ffc_conv(const Image& x, const FfcWeights& w, FfcMode mode) {
  const std::size_t cin = w.in_channels;
  const std::size_t cout = w.out_channels;
  if (x.channels() != cin) {
    throw Error(ErrorKind::ShapeMismatch, "ffc_conv: input has " + std::to_string(x.channels()) +
                                              " channels, weights expect " + std::to_string(cin));
  }
  if (w.spectral_weight.size() != 4 * cin * cout || (!w.spectral_bias.empty() && w.spectral_bias.size() != 2 * cout)) {
    throw Error(ErrorKind::ShapeMismatch, "ffc_conv: spectral weight shape");
  }
  const std::size_t h = x.height();
  const std::size_t wd = x.width();
  const std::size_t n = h * wd;

  std::vector<std::vector<std::complex<double>>> spectra(cin, std::vector<std::complex<double>>(n));
  parallel_for(cin, [&](std::size_t c) {
    auto& s = spectra[c];
    for (std::size_t p = 0; p < n; ++p) s[p] = x.values()[p * cin + c];
    fft::forward_2d(s, h, wd);
  });

  std::vector<std::vector<std::complex<double>>> mixed(cout, std::vector<std::complex<double>>(n));
  parallel_for(h, [&](std::size_t row) {
    std::vector<double> in(2 * cin);
    std::vector<double> out(2 * cout);
    for (std::size_t p = row * wd; p < (row + 1) * wd; ++p) {
      for (std::size_t c = 0; c < cin; ++c) {
        in[2 * c] = spectra[c][p].real();
        in[2 * c + 1] = spectra[c][p].imag();
      }
      for (std::size_t o = 0; o < 2 * cout; ++o) {
        double acc = w.spectral_bias.empty() ? 0.0 : w.spectral_bias[o];
        const float* row_w = w.spectral_weight.data() + o * 2 * cin;
        for (std::size_t i = 0; i < 2 * cin; ++i) acc += static_cast<double>(row_w[i]) * in[i];
        out[o] = (mode == FfcMode::Relu) ? std::max(acc, 0.0) : acc;
      }
      for (std::size_t o = 0; o < cout; ++o) mixed[o][p] = {out[2 * o], out[2 * o + 1]};
    }
  });

  Image y(h, wd, cout);
  parallel_for(cout, [&](std::size_t o) {
    auto& s = mixed[o];
    fft::inverse_2d(s, h, wd);
    for (std::size_t p = 0; p < n; ++p) y.values()[p * cout + o] = static_cast<float>(s[p].real());
  });
  return y;
}

Image lfeb_block(const Image& x, const LfebWeights& w) {
  const std::size_t c = w.channels;
  if (x.channels() != c) {
    throw Error(ErrorKind::ShapeMismatch, "lfeb_block: input has " + std::to_string(x.channels()) +
                                              " channels, weights " + std::to_string(c));
  }
  Image t = ops::depthwise_conv(ffc_conv(x, w.ffc1), w.spatial_weight, w.spatial_bias, kLfebSpatialKernel, 2);
  Image y1 = ops::pointwise(ops::simple_gate(t), w.proj_weight, w.proj_bias, c);
  add_inplace(y1, x);

  Image e = ops::pointwise(ffc_conv(y1, w.ffc2), w.expand_weight, w.expand_bias, 4 * c);
  Image y2 = ops::pointwise(ops::simple_gate(e), w.compress_weight, w.compress_bias, c);
  add_inplace(y2, y1);
  return y2;
}

}  // namespace cwnet
