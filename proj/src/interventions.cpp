#include "cwnet/interventions.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cwnet/rng.hpp"

namespace cwnet {
namespace {

void require_rgb(const Image& img, const char* what) {
  if (img.channels() != 3) {
    throw Error(ErrorKind::ShapeMismatch, std::string(what) + " needs a 3-channel image, got " + img.shape_string());
  }
}

void require_range(double v, double lo, double hi, const char* name) {
  if (!(v >= lo && v <= hi)) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " = " + std::to_string(v) + " outside [" +
                                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

float clamp01(double v) noexcept { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

}  // namespace

void check_default_ranges(const LightInterventionSpec& spec) {
  require_range(spec.gamma, kGammaMin, kGammaMax, "gamma");
  require_range(spec.noise_variance, kNoiseVarMin, kNoiseVarMax, "noise variance");
}

void check_default_ranges(const ColorInterventionSpec& spec) {
  require_range(spec.hue_shift, -kHueShiftLimit, kHueShiftLimit, "hue shift");
  require_range(spec.sat_shift, -kByteShiftLimit, kByteShiftLimit, "saturation shift");
  for (double o : spec.rgb_offsets) require_range(o, -kByteShiftLimit, kByteShiftLimit, "rgb offset");
  require_range(spec.noise_variance, kNoiseVarMin, kNoiseVarMax, "noise variance");
}

LightInterventionSpec sample_light_spec(std::uint64_t seed) {
  SplitMix64 rng(mix_seed(seed, 0x4C49474854ull));
  LightInterventionSpec spec;
  spec.gamma = rng.uniform(kGammaMin, kGammaMax);
  spec.noise_variance = rng.uniform(kNoiseVarMin, kNoiseVarMax);
  spec.seed = seed;
  return spec;
}

ColorInterventionSpec sample_color_spec(std::uint64_t seed) {
  SplitMix64 rng(mix_seed(seed, 0x434F4C4F52ull));
  ColorInterventionSpec spec;
  spec.hue_shift = rng.uniform(-kHueShiftLimit, kHueShiftLimit);
  spec.sat_shift = rng.uniform(-kByteShiftLimit, kByteShiftLimit);
  for (double& o : spec.rgb_offsets) o = rng.uniform(-kByteShiftLimit, kByteShiftLimit);
  spec.noise_variance = rng.uniform(kNoiseVarMin, kNoiseVarMax);
  spec.seed = seed;
  return spec;
}

Image gaussian_blur(const Image& img, double sigma) {
  if (!(sigma > 0.0)) return img;
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double w = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
    taps[static_cast<std::size_t>(i + radius)] = w;
    total += w;
  }
  for (double& t : taps) t /= total;

  const std::size_t h = img.height(), w = img.width(), ch = img.channels();
  const auto ih = static_cast<std::ptrdiff_t>(h), iw = static_cast<std::ptrdiff_t>(w);
  std::vector<double> rows(img.size(), 0.0);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        const auto sx = static_cast<std::size_t>(reflect_index(static_cast<std::ptrdiff_t>(x) + k, iw));
        const double t = taps[static_cast<std::size_t>(k + radius)];
        for (std::size_t c = 0; c < ch; ++c) rows[(y * w + x) * ch + c] += t * img.at(y, sx, c);
      }
  Image out(h, w, ch);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
          const auto sy = static_cast<std::size_t>(reflect_index(static_cast<std::ptrdiff_t>(y) + k, ih));
          acc += taps[static_cast<std::size_t>(k + radius)] * rows[(sy * w + x) * ch + c];
        }
        out.at(y, x, c) = static_cast<float>(acc);
      }
  return out;
}

Image illumination_map(const Image& img, const LightInterventionSpec& spec) {
  require_rgb(img, "illumination_map");
  Image max_rgb(img.height(), img.width(), 1);
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    const float* px = img.values().data() + 3 * p;
    max_rgb.values()[p] = std::max({px[0], px[1], px[2]});
  }
  Image blurred = gaussian_blur(max_rgb, spec.blur_sigma);
  const auto floor = static_cast<float>(spec.illum_floor);
  for (float& v : blurred.values()) v = std::clamp(v, floor, 1.0f);
  return blurred;
}

Image degrade_light(const Image& img, const LightInterventionSpec& spec) {
  require_rgb(img, "degrade_light");
  const Image illum = illumination_map(img, spec);
  const double sd = std::sqrt(std::max(spec.noise_variance, 0.0));
  SplitMix64 rng(spec.seed);
  Image out(img.height(), img.width(), 3);
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    const double gain = std::pow(static_cast<double>(illum.values()[p]), spec.gamma - 1.0);
    for (std::size_t c = 0; c < 3; ++c) {
      const double noise = sd * rng.gaussian();
      out.values()[3 * p + c] = clamp01(static_cast<double>(img.values()[3 * p + c]) * gain + noise);
    }
  }
  return out;
}

Hsv rgb_to_hsv(double r, double g, double b) noexcept {
  const double hi = std::max({r, g, b});
  const double lo = std::min({r, g, b});
  const double delta = hi - lo;
  Hsv out{0.0, hi > 0.0 ? delta / hi : 0.0, hi};
  if (delta > 0.0) {
    double h;
    if (hi == r) h = std::fmod((g - b) / delta, 6.0);
    else if (hi == g) h = (b - r) / delta + 2.0;
    else h = (r - g) / delta + 4.0;
    h *= 60.0;
    if (h < 0.0) h += 360.0;
    out.h = h;
  }
  return out;
}

std::array<double, 3> hsv_to_rgb(const Hsv& hsv) noexcept {
  const double c = hsv.v * hsv.s;
  double h = std::fmod(hsv.h, 360.0);
  if (h < 0.0) h += 360.0;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  const double m = hsv.v - c;
  double r = 0.0, g = 0.0, b = 0.0;
  switch (static_cast<int>(hp)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  return {r + m, g + m, b + m};
}

Image degrade_color(const Image& img, const ColorInterventionSpec& spec) {
  require_rgb(img, "degrade_color");
  const double sd = std::sqrt(std::max(spec.noise_variance, 0.0));
  SplitMix64 rng(spec.seed);
  Image out(img.height(), img.width(), 3);
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    const float* px = img.values().data() + 3 * p;
    Hsv hsv = rgb_to_hsv(px[0], px[1], px[2]);
    hsv.h += spec.hue_shift;
    hsv.s = std::clamp(hsv.s + spec.sat_shift / 255.0, 0.0, 1.0);
    auto rgb = hsv_to_rgb(hsv);
    for (std::size_t c = 0; c < 3; ++c) {
      const double noise = sd * rng.gaussian();
      out.values()[3 * p + c] = clamp01(rgb[c] + spec.rgb_offsets[c] / 255.0 + noise);
    }
  }
  return out;
}

Image apply_intervention(const Image& img, const InterventionSpec& spec) {
  return std::visit(
      [&](const auto& s) -> Image {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, LightInterventionSpec>) return degrade_light(img, s);
        else return degrade_color(img, s);
      },
      spec);
}

InterventionSpec with_seed(InterventionSpec spec, std::uint64_t seed) {
  std::visit([seed](auto& s) { s.seed = seed; }, spec);
  return spec;
}

std::uint64_t seed_of(const InterventionSpec& spec) {
  return std::visit([](const auto& s) { return s.seed; }, spec);
}

}  // namespace cwnet
