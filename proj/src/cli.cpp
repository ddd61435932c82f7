#include "cwnet/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cwnet/archive.hpp"
#include "cwnet/causal.hpp"
#include "cwnet/fixtures.hpp"
#include "cwnet/image_io.hpp"
#include "cwnet/interventions.hpp"
#include "cwnet/metrics.hpp"
#include "cwnet/network.hpp"

namespace cwnet::cli {
namespace {

// Locale-independent fixed-point formatting.
std::string fixed(double v, int digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigFlags {
  std::size_t base_channels = 16;
  std::vector<std::size_t> lf_blocks{1, 3, 4, 3, 1};
  std::vector<std::size_t> hf_blocks{1, 2, 2, 2, 1};
  std::size_t state_dim = 8;

  void attach(CLI::App* app) {
    app->add_option("--base-channels", base_channels, "Feature channels of the first stage")->capture_default_str();
    app->add_option("--lf-blocks", lf_blocks, "LFEB blocks per stage")->delimiter(',')->capture_default_str();
    app->add_option("--hf-blocks", hf_blocks, "HF-Mamba blocks per stage")->delimiter(',')->capture_default_str();
    app->add_option("--state-dim", state_dim, "SSM state size")->capture_default_str();
  }

  NetworkConfig config() const {
    NetworkConfig cfg;
    cfg.base_channels = base_channels;
    cfg.lf_blocks = lf_blocks;
    cfg.hf_blocks = hf_blocks;
    cfg.state_dim = state_dim;
    try {
      cfg.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

std::string shape_of(const NamedTensor& t) {
  std::string s;
  for (std::size_t i = 0; i < t.shape.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(t.shape[i]);
  }
  return s.empty() ? "scalar" : s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wavelet/state-space low-light enhancement engine with causal degradation tools", "cwnet"};
  app.require_subcommand(1);

  // enhance
  auto* enhance = app.add_subcommand("enhance", "Enhance a low-light PNG with a weight archive");
  std::string enh_input, enh_weights, enh_output;
  ConfigFlags enh_cfg;
  enhance->add_option("--input", enh_input)->required()->check(CLI::ExistingFile);
  enhance->add_option("--weights", enh_weights)->required()->check(CLI::ExistingFile);
  enhance->add_option("--output", enh_output)->required();
  enh_cfg.attach(enhance);

  // degrade light|color
  auto* degrade = app.add_subcommand("degrade", "Synthesize a light or color intervention");
  degrade->require_subcommand(1);
  auto* light = degrade->add_subcommand("light", "Illumination degradation I * L^(gamma-1) + noise");
  auto* color = degrade->add_subcommand("color", "Hue/saturation/RGB-offset anomaly plus noise");
  std::string deg_input, deg_output;
  std::uint64_t deg_seed = 0;
  bool deg_force = false;
  std::optional<double> gamma, light_var, blur_sigma, illum_floor;
  std::optional<double> hue, sat, color_var;
  std::vector<double> offsets;
  for (auto* sub : {light, color}) {
    sub->add_option("--input", deg_input)->required()->check(CLI::ExistingFile);
    sub->add_option("--output", deg_output)->required();
    sub->add_option("--seed", deg_seed, "Noise / sampling seed")->capture_default_str();
    sub->add_flag("--force", deg_force, "Allow values outside the default ranges");
  }
  light->add_option("--gamma", gamma, "Degradation exponent, [2,5]");
  light->add_option("--variance", light_var, "Gaussian noise variance, [0.03,0.08]");
  light->add_option("--blur-sigma", blur_sigma, "Illumination map blur (px)");
  light->add_option("--illum-floor", illum_floor, "Illumination map floor");
  color->add_option("--hue", hue, "Hue shift in degrees, [-30,30]");
  color->add_option("--sat", sat, "Saturation shift in 8-bit units, [-50,50]");
  color->add_option("--offsets", offsets, "R,G,B offsets in 8-bit units, [-50,50]")->delimiter(',')->expected(3);
  color->add_option("--variance", color_var, "Gaussian noise variance, [0.03,0.08]");

  // ate
  auto* ate = app.add_subcommand("ate", "Per-patch average treatment effect heatmap");
  std::string ate_input, ate_heatmap, ate_scores, ate_kind = "light";
  std::size_t ate_patch = kDefaultPatchSize, ate_levels = kDefaultIntensityLevels;
  std::uint64_t ate_seed = 0;
  ate->add_option("--input", ate_input, "Reference (normal-light) image")->required()->check(CLI::ExistingFile);
  ate->add_option("--intervention", ate_kind)->check(CLI::IsMember({"light", "color"}))->capture_default_str();
  ate->add_option("--heatmap", ate_heatmap, "Output heatmap PNG")->required();
  ate->add_option("--scores", ate_scores, "Output text sidecar of raw dB scores")->required();
  ate->add_option("--patch", ate_patch)->capture_default_str();
  ate->add_option("--levels", ate_levels, "Intensity levels T")->check(CLI::PositiveNumber)->capture_default_str();
  ate->add_option("--seed", ate_seed)->capture_default_str();

  // metrics
  auto* metrics = app.add_subcommand("metrics", "PSNR and SSIM of a test image against a reference");
  std::string met_ref, met_test;
  metrics->add_option("--ref", met_ref)->required()->check(CLI::ExistingFile);
  metrics->add_option("--test", met_test)->required()->check(CLI::ExistingFile);

  // weights inspect|random|check-fixture
  auto* weights = app.add_subcommand("weights", "Weight archive utilities");
  weights->require_subcommand(1);
  auto* inspect = weights->add_subcommand("inspect", "List tensors and the parameter count");
  auto* random = weights->add_subcommand("random", "Write a seeded random-init archive");
  auto* check = weights->add_subcommand("check-fixture", "Compare the engine against golden activations");
  std::string w_path, w_output, fixture_path;
  std::uint64_t w_seed = 0;
  ConfigFlags w_cfg;
  inspect->add_option("--weights", w_path)->required()->check(CLI::ExistingFile);
  random->add_option("--output", w_output)->required();
  random->add_option("--seed", w_seed)->capture_default_str();
  w_cfg.attach(random);
  check->add_option("--fixture", fixture_path)->required()->check(CLI::ExistingFile);
  check->add_option("--weights", w_path)->required()->check(CLI::ExistingFile);
  w_cfg.attach(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (enhance->parsed()) {
      const NetworkConfig cfg = enh_cfg.config();
      const WeightArchive archive = load_archive(enh_weights);
      const Image input = load_image(enh_input);
      if (input.channels() != 3) throw UsageError("enhance needs an RGB input");
      save_image(network_forward(input, archive, cfg), enh_output);
      out << "output=" << enh_output << "\n";
    } else if (light->parsed()) {
      LightInterventionSpec spec = sample_light_spec(deg_seed);
      if (gamma) spec.gamma = *gamma;
      if (light_var) spec.noise_variance = *light_var;
      if (blur_sigma) spec.blur_sigma = *blur_sigma;
      if (illum_floor) spec.illum_floor = *illum_floor;
      if (!deg_force) {
        try {
          check_default_ranges(spec);
        } catch (const Error& e) {
          throw UsageError(std::string(e.what()) + " (use --force to override)");
        }
      }
      const Image input = load_image(deg_input);
      if (input.channels() != 3) throw UsageError("degrade needs an RGB input");
      save_image(degrade_light(input, spec), deg_output);
      out << "seed=" << deg_seed << " gamma=" << fixed(spec.gamma, 6) << " variance=" << fixed(spec.noise_variance, 6)
          << "\n";
    } else if (color->parsed()) {
      ColorInterventionSpec spec = sample_color_spec(deg_seed);
      if (hue) spec.hue_shift = *hue;
      if (sat) spec.sat_shift = *sat;
      if (!offsets.empty()) spec.rgb_offsets = {offsets[0], offsets[1], offsets[2]};
      if (color_var) spec.noise_variance = *color_var;
      if (!deg_force) {
        try {
          check_default_ranges(spec);
        } catch (const Error& e) {
          throw UsageError(std::string(e.what()) + " (use --force to override)");
        }
      }
      const Image input = load_image(deg_input);
      if (input.channels() != 3) throw UsageError("degrade needs an RGB input");
      save_image(degrade_color(input, spec), deg_output);
      out << "seed=" << deg_seed << " hue=" << fixed(spec.hue_shift, 6) << " sat=" << fixed(spec.sat_shift, 6)
          << " offsets=" << fixed(spec.rgb_offsets[0], 6) << "," << fixed(spec.rgb_offsets[1], 6) << ","
          << fixed(spec.rgb_offsets[2], 6) << " variance=" << fixed(spec.noise_variance, 6) << "\n";
    } else if (ate->parsed()) {
      const Image input = load_image(ate_input);
      if (input.channels() != 3) throw UsageError("ate needs an RGB input");
      if (ate_patch < kMinPatchSize) throw UsageError("--patch must be at least " + std::to_string(kMinPatchSize));
      const auto ladder = ate_kind == "light" ? light_intensity_ladder(ate_levels) : color_intensity_ladder(ate_levels);
      const AttributionMap map = ate_map(input, ladder, ate_patch, ate_seed);
      save_attribution(map, ate_heatmap, ate_scores);
      double hi = map.scores.front();
      for (double s : map.scores) hi = std::max(hi, s);
      out << "seed=" << ate_seed << " grid=" << map.grid_rows << "x" << map.grid_cols << " max_ate=" << fixed(hi, 3)
          << "\n";
    } else if (metrics->parsed()) {
      const Image ref = load_image(met_ref);
      const Image test = load_image(met_test);
      const double p = psnr(test, ref).value;
      const double s = ssim(test, ref).value;
      out << "psnr=" << fixed(p, 3) << " ssim=" << fixed(s, 6) << "\n";
    } else if (inspect->parsed()) {
      const WeightArchive archive = load_archive(w_path);
      for (const auto& t : archive.tensors()) {
        out << t.name << " " << shape_of(t) << " " << t.data.size() << "\n";
      }
      out << "tensors=" << archive.size() << " parameters=" << archive.parameter_count() << "\n";
    } else if (random->parsed()) {
      const NetworkConfig cfg = w_cfg.config();
      const WeightArchive archive = random_init(cfg, w_seed);
      save_archive(archive, w_output);
      out << "seed=" << w_seed << " tensors=" << archive.size() << " parameters=" << archive.parameter_count() << "\n";
    } else if (check->parsed()) {
      const NetworkConfig cfg = w_cfg.config();
      const auto results = check_fixture(load_archive(fixture_path), load_archive(w_path), cfg);
      bool all = !results.empty();
      for (const auto& r : results) {
        out << r.op << " max_abs=" << fixed(r.max_abs_error, 9) << (r.passed ? " PASS" : " FAIL") << "\n";
        all = all && r.passed;
      }
      if (results.empty()) err << "fixture holds no recognised ops\n";
      return all ? 0 : 2;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace cwnet::cli
