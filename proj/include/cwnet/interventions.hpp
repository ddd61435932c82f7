#pragma once

#include <array>
#include <cstdint>
#include <variant>

#include "cwnet/tensor.hpp"

namespace cwnet {

/// Default sampling ranges; values outside them need an explicit opt-in.
inline constexpr double kGammaMin = 2.0, kGammaMax = 5.0;
inline constexpr double kNoiseVarMin = 0.03, kNoiseVarMax = 0.08;
inline constexpr double kHueShiftLimit = 30.0;  // degrees
inline constexpr double kByteShiftLimit = 50.0;  // 8-bit units, saturation and RGB offsets

struct LightInterventionSpec {
  double gamma = 3.0;
  double noise_variance = 0.05;
  std::uint64_t seed = 0;
  double illum_floor = 0.01;
  double blur_sigma = 3.0;
};

struct ColorInterventionSpec {
  double hue_shift = 0.0;  // degrees
  double sat_shift = 0.0;  // 8-bit units
  std::array<double, 3> rgb_offsets{0.0, 0.0, 0.0};  // 8-bit units
  double noise_variance = 0.0;
  std::uint64_t seed = 0;
};

using InterventionSpec = std::variant<LightInterventionSpec, ColorInterventionSpec>;

/// Throws InvalidArgument when a field lies outside the default ranges.
void check_default_ranges(const LightInterventionSpec& spec);
void check_default_ranges(const ColorInterventionSpec& spec);

/// Uniform draws inside the default ranges.
LightInterventionSpec sample_light_spec(std::uint64_t seed);
ColorInterventionSpec sample_color_spec(std::uint64_t seed);

/// Max over RGB, Gaussian-blurred with blur_sigma (reflect padded), clamped
/// to [illum_floor, 1]. Returns a single-channel image.
Image illumination_map(const Image& img, const LightInterventionSpec& spec);

/// I * L^(gamma - 1) + N(0, noise_variance), clamped to [0, 1].
Image degrade_light(const Image& img, const LightInterventionSpec& spec);

/// HSV hue rotation, then saturation shift, back to RGB, then per-channel
/// offsets, then noise; clamped to [0, 1].
Image degrade_color(const Image& img, const ColorInterventionSpec& spec);

Image apply_intervention(const Image& img, const InterventionSpec& spec);

/// Replaces the seed inside either spec kind.
InterventionSpec with_seed(InterventionSpec spec, std::uint64_t seed);
std::uint64_t seed_of(const InterventionSpec& spec);

/// Separable normalized Gaussian blur of every channel, radius ceil(3 sigma).
Image gaussian_blur(const Image& img, double sigma);

struct Hsv {
  double h;  // degrees [0, 360)
  double s;
  double v;
};
Hsv rgb_to_hsv(double r, double g, double b) noexcept;
std::array<double, 3> hsv_to_rgb(const Hsv& hsv) noexcept;

}  // namespace cwnet
