#include "cwnet/network.hpp"

#include <cmath>

#include "cwnet/ops.hpp"
#include "cwnet/rng.hpp"
#include "cwnet/wavelet.hpp"

namespace cwnet {

void NetworkConfig::validate() const {
  if (lf_blocks.size() != hf_blocks.size() || lf_blocks.empty() || lf_blocks.size() % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "lf_blocks and hf_blocks need one shared odd length");
  }
  if (base_channels == 0 || state_dim == 0 || vssm_expand == 0) {
    throw Error(ErrorKind::InvalidArgument, "channel, state and expansion sizes must be positive");
  }
  if (wtconv.levels == 0 || wtconv.kernel_size % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "wtconv needs levels >= 1 and an odd kernel");
  }
}

std::size_t NetworkConfig::stage_channels(std::size_t stage) const noexcept {
  const std::size_t d = downsamples();
  const std::size_t depth = stage <= d ? stage : 2 * d - stage;
  return base_channels << depth;
}

std::size_t NetworkConfig::size_multiple() const noexcept {
  // downsamples, then one DWT inside the HFRB, then the WTConv cascade
  return std::size_t{1} << (downsamples() + 1 + wtconv.levels);
}

namespace {

using Shape = std::vector<std::uint64_t>;

class Visitor {
 public:
  virtual ~Visitor() = default;
  virtual std::span<const float> tensor(const std::string& name, Shape shape, InitKind init, std::size_t fan_in) = 0;

  std::span<const float> weight(const std::string& name, Shape shape, std::size_t fan_in) {
    return tensor(name, std::move(shape), InitKind::FanIn, fan_in);
  }
  std::span<const float> bias(const std::string& name, std::size_t n) { return tensor(name, {n}, InitKind::Zero, 0); }
};

class LayoutVisitor final : public Visitor {
 public:
  std::span<const float> tensor(const std::string& name, Shape shape, InitKind init, std::size_t fan_in) override {
    specs.push_back({name, std::move(shape), init, fan_in});
    return {};
  }
  std::vector<TensorSpec> specs;
};

class ArchiveVisitor final : public Visitor {
 public:
  explicit ArchiveVisitor(const WeightArchive& archive) : archive_(archive) {}
  std::span<const float> tensor(const std::string& name, Shape shape, InitKind, std::size_t) override {
    return archive_.view(name, shape);
  }

 private:
  const WeightArchive& archive_;
};

struct ConvLayer {
  ops::ConvParams params;
};

ConvLayer describe_conv(Visitor& v, const std::string& prefix, std::size_t in, std::size_t out, std::size_t k) {
  ConvLayer c;
  c.params.weight = v.weight(prefix + ".weight", {out, in, k, k}, in * k * k);
  c.params.bias = v.bias(prefix + ".bias", out);
  c.params.in_channels = in;
  c.params.out_channels = out;
  c.params.kernel = k;
  return c;
}

FeBlockWeights describe_fe(Visitor& v, const std::string& prefix, std::size_t c, const NetworkConfig& cfg) {
  FeBlockWeights w;
  w.channels = c;
  const std::size_t k = cfg.wtconv.kernel_size;
  w.wtconv.config = cfg.wtconv;
  w.wtconv.channels = c;
  w.wtconv.base = v.weight(prefix + ".wtconv.base", {c, 1, k, k}, k * k);
  for (std::size_t l = 0; l < cfg.wtconv.levels; ++l) {
    w.wtconv.level.push_back(v.weight(prefix + ".wtconv.level" + std::to_string(l), {4 * c, 1, k, k}, k * k));
  }
  auto branch = [&](const std::string& name) {
    DetailBranch b;
    b.depthwise = v.weight(prefix + "." + name + ".depthwise.weight", {c, 1, 3, 3}, 9);
    b.bias = v.bias(prefix + "." + name + ".depthwise.bias", c);
    b.mix.weight = v.weight(prefix + "." + name + ".mix.weight", {c, c}, c);
    b.mix.bias = v.bias(prefix + "." + name + ".mix.bias", c);
    return b;
  };
  w.horiz = branch("h");
  w.vert = branch("v");
  w.diag = branch("d");
  return w;
}

HfMambaWeights describe_hf(Visitor& v, const std::string& p, std::size_t c, const NetworkConfig& cfg) {
  const std::size_t e = c * cfg.vssm_expand;
  const std::size_t n = cfg.state_dim;
  HfMambaWeights w;
  w.channels = c;
  w.inner = e;
  w.ln1_weight = v.tensor(p + ".ln1.weight", {c}, InitKind::One, 0);
  w.ln1_bias = v.bias(p + ".ln1.bias", c);
  w.in_proj_weight = v.weight(p + ".in_proj.weight", {2 * e, c}, c);
  w.in_proj_bias = v.bias(p + ".in_proj.bias", 2 * e);
  w.dw_weight = v.weight(p + ".dwconv.weight", {e, 1, 3, 3}, 9);
  w.dw_bias = v.bias(p + ".dwconv.bias", e);
  w.ssm.channels = e;
  w.ssm.state_dim = n;
  w.ssm.a_log = v.tensor(p + ".ssm.a_log", {e, n}, InitKind::NegLogDecay, 0);
  w.ssm.delta_weight = v.weight(p + ".ssm.delta_proj.weight", {e, e}, e);
  w.ssm.delta_bias = v.bias(p + ".ssm.delta_proj.bias", e);
  w.ssm.b_proj = v.weight(p + ".ssm.b_proj.weight", {n, e}, e);
  w.ssm.c_proj = v.weight(p + ".ssm.c_proj.weight", {n, e}, e);
  w.ssm.d_ff = v.tensor(p + ".ssm.d", {e}, InitKind::FeedThrough, 0);
  w.out_proj_weight = v.weight(p + ".out_proj.weight", {c, e}, e);
  w.out_proj_bias = v.bias(p + ".out_proj.bias", c);
  w.ln2_weight = v.tensor(p + ".ln2.weight", {c}, InitKind::One, 0);
  w.ln2_bias = v.bias(p + ".ln2.bias", c);
  w.ffn_in_weight = v.weight(p + ".ffn_in.weight", {2 * c, c}, c);
  w.ffn_in_bias = v.bias(p + ".ffn_in.bias", 2 * c);
  w.ffn_out_weight = v.weight(p + ".ffn_out.weight", {c, c}, c);
  w.ffn_out_bias = v.bias(p + ".ffn_out.bias", c);
  return w;
}

LfebWeights describe_lfeb(Visitor& v, const std::string& p, std::size_t c) {
  LfebWeights w;
  w.channels = c;
  auto ffc = [&](const std::string& name) {
    FfcWeights f;
    f.in_channels = c;
    f.out_channels = c;
    f.spectral_weight = v.weight(p + "." + name + ".weight", {2 * c, 2 * c}, 2 * c);
    f.spectral_bias = v.bias(p + "." + name + ".bias", 2 * c);
    return f;
  };
  const std::size_t k = kLfebSpatialKernel;
  w.ffc1 = ffc("ffc1");
  w.spatial_weight = v.weight(p + ".spatial.weight", {2 * c, 1, k, k}, k * k);
  w.spatial_bias = v.bias(p + ".spatial.bias", 2 * c);
  w.proj_weight = v.weight(p + ".proj.weight", {c, c}, c);
  w.proj_bias = v.bias(p + ".proj.bias", c);
  w.ffc2 = ffc("ffc2");
  w.expand_weight = v.weight(p + ".expand.weight", {4 * c, c}, c);
  w.expand_bias = v.bias(p + ".expand.bias", 4 * c);
  w.compress_weight = v.weight(p + ".compress.weight", {c, 2 * c}, 2 * c);
  w.compress_bias = v.bias(p + ".compress.bias", c);
  return w;
}

HfrbWeights describe_hfrb(Visitor& v, const NetworkConfig& cfg, std::size_t stage) {
  const std::string p = hfrb_prefix(stage);
  const std::size_t c = cfg.stage_channels(stage);
  HfrbWeights w;
  w.fe = describe_fe(v, p + ".fe", c, cfg);
  for (std::size_t b = 0; b < cfg.hf_blocks[stage]; ++b) {
    w.hf_h.push_back(describe_hf(v, p + ".hf_h" + std::to_string(b), c, cfg));
    w.hf_v.push_back(describe_hf(v, p + ".hf_v" + std::to_string(b), c, cfg));
    w.hf_d.push_back(describe_hf(v, p + ".hf_d" + std::to_string(b), c, cfg));
  }
  for (std::size_t b = 0; b < cfg.lf_blocks[stage]; ++b) {
    w.lf.push_back(describe_lfeb(v, p + ".lf" + std::to_string(b), c));
  }
  return w;
}

struct NetworkWeights {
  ConvLayer stem;
  std::vector<HfrbWeights> stages;
  std::vector<ConvLayer> down;
  std::vector<ConvLayer> up;
  ConvLayer head;
};

// Archive order: stem, stage0, down0, stage1, down1, ..., bottleneck,
// up0, next stage, ..., head.
NetworkWeights describe_network(Visitor& v, const NetworkConfig& cfg, bool encoder_only = false) {
  cfg.validate();
  const std::size_t d = cfg.downsamples();
  NetworkWeights w;
  w.stem = describe_conv(v, "stem", 3, cfg.base_channels, 3);
  for (std::size_t s = 0; s < cfg.stages(); ++s) {
    if (encoder_only && s > d) break;
    if (s > d) {
      const std::size_t k = s - d - 1;
      w.up.push_back(describe_conv(v, "up" + std::to_string(k), cfg.stage_channels(s - 1), cfg.stage_channels(s), 1));
    }
    w.stages.push_back(describe_hfrb(v, cfg, s));
    if (s < d) {
      w.down.push_back(
          describe_conv(v, "down" + std::to_string(s), cfg.stage_channels(s), cfg.stage_channels(s + 1), 3));
    }
  }
  if (!encoder_only) w.head = describe_conv(v, "head", cfg.base_channels, 3, 3);
  return w;
}

Image padded_to_multiple(const Image& img, std::size_t multiple) {
  const std::size_t h = (img.height() + multiple - 1) / multiple * multiple;
  const std::size_t w = (img.width() + multiple - 1) / multiple * multiple;
  if (h == img.height() && w == img.width()) return img;
  return pad_reflect(img, h, w);
}

// Runs stem + encoder + bottleneck, storing encoder outputs for the skips.
Image encode(const Image& padded, const NetworkWeights& w, const NetworkConfig& cfg, std::vector<Image>& skips) {
  Image x = ops::conv2d(padded, w.stem.params);
  const std::size_t d = cfg.downsamples();
  for (std::size_t s = 0; s < d; ++s) {
    x = hfrb_forward(x, w.stages[s]);
    skips.push_back(x);
    x = ops::conv2d(x, w.down[s].params, 2);
  }
  return hfrb_forward(x, w.stages[d]);
}

}  // namespace

std::vector<TensorSpec> weight_layout(const NetworkConfig& cfg) {
  LayoutVisitor v;
  describe_network(v, cfg);
  return std::move(v.specs);
}

std::size_t parameter_count(const NetworkConfig& cfg) {
  std::size_t n = 0;
  for (const auto& spec : weight_layout(cfg)) {
    std::size_t e = 1;
    for (auto dim : spec.shape) e *= static_cast<std::size_t>(dim);
    n += e;
  }
  return n;
}

WeightArchive random_init(const NetworkConfig& cfg, std::uint64_t seed) {
  WeightArchive archive;
  SplitMix64 rng(seed);
  for (auto& spec : weight_layout(cfg)) {
    std::size_t count = 1;
    for (auto dim : spec.shape) count *= static_cast<std::size_t>(dim);
    std::vector<float> data(count, 0.0f);
    switch (spec.init) {
      case InitKind::FanIn: {
        const double bound = 1.0 / std::sqrt(static_cast<double>(spec.fan_in));
        for (float& v : data) v = static_cast<float>(rng.uniform(-bound, bound));
        break;
      }
      case InitKind::Zero: break;
      case InitKind::One:
      case InitKind::FeedThrough: std::fill(data.begin(), data.end(), 1.0f); break;
      case InitKind::NegLogDecay:
        for (float& v : data) v = static_cast<float>(std::log(rng.uniform(0.5, 1.0)));
        break;
    }
    archive.add(std::move(spec.name), std::move(spec.shape), std::move(data));
  }
  return archive;
}

WeightArchive zero_init(const NetworkConfig& cfg) {
  WeightArchive archive;
  for (auto& spec : weight_layout(cfg)) {
    std::size_t count = 1;
    for (auto dim : spec.shape) count *= static_cast<std::size_t>(dim);
    archive.add(std::move(spec.name), std::move(spec.shape), std::vector<float>(count, 0.0f));
  }
  return archive;
}

std::string hfrb_prefix(std::size_t stage) { return "stage" + std::to_string(stage) + ".hfrb0"; }

HfrbWeights bind_hfrb(const WeightArchive& archive, const NetworkConfig& cfg, std::size_t stage) {
  cfg.validate();
  if (stage >= cfg.stages()) throw Error(ErrorKind::InvalidArgument, "stage index out of range");
  ArchiveVisitor v(archive);
  return describe_hfrb(v, cfg, stage);
}

HfMambaWeights bind_hf_mamba(const WeightArchive& archive, const std::string& prefix, std::size_t channels,
                             const NetworkConfig& cfg) {
  ArchiveVisitor v(archive);
  return describe_hf(v, prefix, channels, cfg);
}

LfebWeights bind_lfeb(const WeightArchive& archive, const std::string& prefix, std::size_t channels) {
  ArchiveVisitor v(archive);
  return describe_lfeb(v, prefix, channels);
}

Image hfrb_forward(const Image& x, const HfrbWeights& w) {
  WaveletSubbands sb = fe_forward(dwt2(x), w.fe);
  for (const auto& blk : w.hf_h) sb.horiz = hf_mamba_block(sb.horiz, blk, {ScanAxis::Horizontal, true});
  for (const auto& blk : w.hf_v) sb.vert = hf_mamba_block(sb.vert, blk, {ScanAxis::Vertical, true});
  for (const auto& blk : w.hf_d) sb.diag = hf_mamba_block(sb.diag, blk, {ScanAxis::Diagonal, true});
  Image y = idwt2(sb);
  for (const auto& blk : w.lf) y = lfeb_block(y, blk);
  return y;
}

Image hfrb_forward(const Image& x, const WeightArchive& archive, const NetworkConfig& cfg, std::size_t stage) {
  return hfrb_forward(x, bind_hfrb(archive, cfg, stage));
}

Image network_forward(const Image& img, const WeightArchive& archive, const NetworkConfig& cfg) {
  if (img.channels() != 3) {
    throw Error(ErrorKind::ShapeMismatch, "network expects a 3-channel image, got " + img.shape_string());
  }
  ArchiveVisitor v(archive);
  const NetworkWeights w = describe_network(v, cfg);
  const Image padded = padded_to_multiple(img, cfg.size_multiple());

  std::vector<Image> skips;
  Image x = encode(padded, w, cfg, skips);
  const std::size_t d = cfg.downsamples();
  for (std::size_t k = 0; k < d; ++k) {
    x = ops::conv2d(ops::upsample_nearest2(x), w.up[k].params);
    add_inplace(x, skips[d - 1 - k]);
    x = hfrb_forward(x, w.stages[d + 1 + k]);
  }
  Image out = ops::conv2d(x, w.head.params);
  add_inplace(out, padded);
  return crop(out, img.height(), img.width());
}

Image extract_features(const Image& img, const WeightArchive& archive, const NetworkConfig& cfg) {
  if (img.channels() != 3) {
    throw Error(ErrorKind::ShapeMismatch, "network expects a 3-channel image, got " + img.shape_string());
  }
  ArchiveVisitor v(archive);
  const NetworkWeights w = describe_network(v, cfg, true);
  const Image padded = padded_to_multiple(img, cfg.size_multiple());
  std::vector<Image> skips;
  const Image features = encode(padded, w, cfg, skips);
  const std::size_t f = std::size_t{1} << cfg.downsamples();
  return crop(features, (img.height() + f - 1) / f, (img.width() + f - 1) / f);
}

}  // namespace cwnet
