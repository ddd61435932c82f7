#include "cwnet/causal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cwnet/image_io.hpp"
#include "cwnet/parallel.hpp"
#include "cwnet/rng.hpp"

namespace cwnet {

AttributionMap ate_map(const Image& reference, std::span<const InterventionSpec> intensities, std::size_t patch_size,
                       std::uint64_t seed) {
  if (intensities.empty()) throw Error(ErrorKind::InvalidArgument, "ate_map needs at least one intensity");
  if (patch_size < kMinPatchSize) {
    throw Error(ErrorKind::InvalidArgument, "patch size must be at least " + std::to_string(kMinPatchSize));
  }
  if (patch_size > std::min(reference.height(), reference.width())) {
    throw Error(ErrorKind::PatchTooLarge, "patch " + std::to_string(patch_size) + " exceeds image " +
                                              reference.shape_string());
  }
  AttributionMap map;
  map.patch_size = patch_size;
  map.image_height = reference.height();
  map.image_width = reference.width();
  map.grid_rows = (reference.height() + patch_size - 1) / patch_size;
  map.grid_cols = (reference.width() + patch_size - 1) / patch_size;
  const std::size_t cells = map.grid_rows * map.grid_cols;
  const double baseline = psnr(reference, reference).value;
  const double total = static_cast<double>(reference.size());
  const std::size_t ch = reference.channels();

  // psnr[t][cell]; outside the patch the composite equals the reference, so
  // the composite's squared error is the patch's share alone.
  std::vector<std::vector<double>> per_intensity(intensities.size(), std::vector<double>(cells, 0.0));
  parallel_for(intensities.size(), [&](std::size_t t) {
    const auto spec = with_seed(intensities[t], mix_seed(seed, seed_of(intensities[t])));
    const Image degraded = apply_intervention(reference, spec);
    std::vector<double> sq(cells, 0.0);
    for (std::size_t y = 0; y < reference.height(); ++y) {
      for (std::size_t x = 0; x < reference.width(); ++x) {
        const std::size_t cell = (y / patch_size) * map.grid_cols + x / patch_size;
        for (std::size_t c = 0; c < ch; ++c) {
          const double d = static_cast<double>(degraded.at(y, x, c)) - reference.at(y, x, c);
          sq[cell] += d * d;
        }
      }
    }
    for (std::size_t cell = 0; cell < cells; ++cell) per_intensity[t][cell] = psnr_from_mse(sq[cell] / total);
  });

  map.scores.assign(cells, 0.0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    double sum = 0.0;
    for (const auto& row : per_intensity) sum += row[cell];
    map.scores[cell] = baseline - sum / static_cast<double>(intensities.size());
  }
  return map;
}

namespace {

double lerp_level(double lo, double hi, std::size_t t, std::size_t levels) {
  if (levels <= 1) return 0.5 * (lo + hi);
  return lo + (hi - lo) * static_cast<double>(t) / static_cast<double>(levels - 1);
}

}  // namespace

std::vector<InterventionSpec> light_intensity_ladder(std::size_t levels) {
  std::vector<InterventionSpec> out;
  for (std::size_t t = 0; t < levels; ++t) {
    LightInterventionSpec s;
    s.gamma = lerp_level(kGammaMin, kGammaMax, t, levels);
    s.noise_variance = lerp_level(kNoiseVarMin, kNoiseVarMax, t, levels);
    s.seed = t;
    out.emplace_back(s);
  }
  return out;
}

std::vector<InterventionSpec> color_intensity_ladder(std::size_t levels) {
  std::vector<InterventionSpec> out;
  for (std::size_t t = 0; t < levels; ++t) {
    ColorInterventionSpec s;
    s.hue_shift = lerp_level(-kHueShiftLimit, kHueShiftLimit, t, levels);
    s.sat_shift = lerp_level(-kByteShiftLimit, kByteShiftLimit, t, levels);
    const double offset = lerp_level(-kByteShiftLimit, kByteShiftLimit, t, levels);
    s.rgb_offsets = {offset, -offset, offset};
    s.noise_variance = lerp_level(kNoiseVarMin, kNoiseVarMax, t, levels);
    s.seed = t;
    out.emplace_back(s);
  }
  return out;
}

Image render_heatmap(const AttributionMap& map) {
  Image out(map.image_height, map.image_width, 1);
  if (map.scores.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(map.scores.begin(), map.scores.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  for (std::size_t y = 0; y < map.image_height; ++y) {
    for (std::size_t x = 0; x < map.image_width; ++x) {
      const double s = map.score(y / map.patch_size, x / map.patch_size);
      out.at(y, x, 0) = span > 0.0 ? static_cast<float>((s - lo) / span) : 0.0f;
    }
  }
  return out;
}

std::string format_scores(const AttributionMap& map) {
  std::string text;
  char buf[64];
  for (std::size_t r = 0; r < map.grid_rows; ++r) {
    for (std::size_t c = 0; c < map.grid_cols; ++c) {
      if (c) text += ' ';
      auto res = std::to_chars(buf, buf + sizeof(buf), map.score(r, c), std::chars_format::fixed, 6);
      text.append(buf, res.ptr);
    }
    text += '\n';
  }
  return text;
}

void save_attribution(const AttributionMap& map, const std::filesystem::path& png_path,
                      const std::filesystem::path& text_path) {
  save_image(render_heatmap(map), png_path);
  std::ofstream out(text_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + text_path.string());
  out << format_scores(map);
}

std::vector<std::vector<double>> parse_scores(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double v = 0.0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) throw Error(ErrorKind::InvalidArgument, "bad score: " + line);
      row.push_back(v);
      p = res.ptr;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double l1_distance(const Image& a, const Image& b) {
  require_same_shape(a, b, "l1_distance");
  if (a.empty()) throw Error(ErrorKind::ShapeMismatch, "l1 of empty features");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(static_cast<double>(a.values()[i]) - b.values()[i]);
  return sum / static_cast<double>(a.size());
}

double causal_metric_loss(const CausalBatch& batch) {
  if (batch.light_negatives.empty() || batch.color_negatives.empty()) {
    throw Error(ErrorKind::InvalidArgument, "causal loss needs at least one light and one color negative");
  }
  const double numerator = l1_distance(batch.positive, batch.anchor);
  double negatives = 0.0;
  for (const auto& f : batch.light_negatives) negatives += l1_distance(f, batch.anchor);
  for (const auto& f : batch.color_negatives) negatives += l1_distance(f, batch.anchor);
  const double xi = 1.0 / static_cast<double>(batch.light_negatives.size() + batch.color_negatives.size());
  const double denominator = xi * negatives;
  if (!(denominator > 0.0)) throw Error(ErrorKind::DegenerateDenominator, "every negative equals the anchor");
  return numerator / denominator;
}

double total_loss(const LossComponents& c, const LossWeights& w) {
  return w.l2 * c.l2 + w.ssim * c.ssim + w.perceptual * c.perceptual + w.causal * c.causal + w.semantic * c.semantic;
}

}  // namespace cwnet
