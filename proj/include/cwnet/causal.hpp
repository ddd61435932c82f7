#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cwnet/interventions.hpp"
#include "cwnet/metrics.hpp"
#include "cwnet/tensor.hpp"

namespace cwnet {

/// Per-patch average treatment effect in dB: how much PSNR the reference
/// loses, on average over intensities, when only that patch is degraded.
struct AttributionMap {
  std::size_t grid_rows = 0;
  std::size_t grid_cols = 0;
  std::size_t patch_size = 0;
  std::size_t image_height = 0;
  std::size_t image_width = 0;
  MetricKind metric = MetricKind::Psnr;
  std::vector<double> scores;  // row-major grid_rows x grid_cols

  double score(std::size_t row, std::size_t col) const { return scores[row * grid_cols + col]; }
};

inline constexpr std::size_t kMinPatchSize = 4;
inline constexpr std::size_t kDefaultPatchSize = 16;
inline constexpr std::size_t kDefaultIntensityLevels = 5;

/// For each grid patch and each intensity spec: the whole reference is
/// degraded with that spec, only the patch's pixels are pasted back into the
/// reference, and PSNR against the reference is recorded.
/// score = PSNR(reference, reference) - mean over intensities.
/// The noise seed of each intensity is mix_seed(seed, spec.seed), so the
/// result does not depend on intensity order.
AttributionMap ate_map(const Image& reference, std::span<const InterventionSpec> intensities, std::size_t patch_size,
                       std::uint64_t seed);

/// `levels` light specs with gamma and noise variance evenly spaced over the
/// default ranges; level t has seed t.
std::vector<InterventionSpec> light_intensity_ladder(std::size_t levels = kDefaultIntensityLevels);
/// `levels` color specs with hue, saturation and offsets evenly spaced over
/// their ranges (offsets shared by all three channels' magnitude, alternating
/// sign per channel); spec t has seed t.
std::vector<InterventionSpec> color_intensity_ladder(std::size_t levels = kDefaultIntensityLevels);

/// Heatmap PNG at image resolution (scores min-max normalized; a flat map
/// renders black) and a text sidecar of raw scores, one grid row per line.
Image render_heatmap(const AttributionMap& map);
std::string format_scores(const AttributionMap& map);
void save_attribution(const AttributionMap& map, const std::filesystem::path& png_path,
                      const std::filesystem::path& text_path);
std::vector<std::vector<double>> parse_scores(const std::string& text);

struct CausalBatch {
  Image anchor;
  Image positive;
  std::vector<Image> light_negatives;
  std::vector<Image> color_negatives;
};

/// Mean absolute difference.
double l1_distance(const Image& a, const Image& b);

/// L1(positive, anchor) / (xi * (sum_l L1(F_l, anchor) + sum_c L1(F_c, anchor)))
/// with xi = 1 / (L + C). Throws DegenerateDenominator when every negative
/// equals the anchor.
double causal_metric_loss(const CausalBatch& batch);

struct LossWeights {
  double l2 = 1.0;
  double ssim = 0.3;
  double perceptual = 0.2;
  double causal = 0.01;
  double semantic = 0.01;
};

struct LossComponents {
  double l2 = 0.0;
  double ssim = 0.0;
  double perceptual = 0.0;
  double causal = 0.0;
  double semantic = 0.0;
};

double total_loss(const LossComponents& c, const LossWeights& w = {});

}  // namespace cwnet
