#include "scgan/generator.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "scgan/error.hpp"
#include "scgan/weights.hpp"

namespace scgan {

namespace F = torch::nn::functional;

void GeneratorConfig::validate() const {
  if (base_channels < 4) throw ConfigError("generator.base_channels must be >= 4");
  if (!(width_multiplier > 0.0)) throw ConfigError("generator.width_multiplier must be positive");
  if (encoder_depth < 3) {
    throw ConfigError("generator.encoder_depth must be >= 3 (saliency branch taps three decoder levels)");
  }
  if (input_size <= 0 || input_size % (1 << encoder_depth) != 0) {
    throw ConfigError("generator.input_size " + std::to_string(input_size) +
                      " is not divisible by 2^encoder_depth = " + std::to_string(1 << encoder_depth));
  }
  if (use_global_encoder && encoder_depth != 5) {
    throw ConfigError("the global encoder has five stride-2 stages; encoder_depth must be 5 when it is enabled");
  }
  if (use_global_encoder && global_feature_channels < 1) {
    throw ConfigError("generator.global_feature_channels must be >= 1");
  }
}

std::int64_t GeneratorConfig::scaled(std::int64_t channels) const {
  return std::max<std::int64_t>(1, std::llround(static_cast<double>(channels) * width_multiplier));
}

std::int64_t GeneratorConfig::level_channels(int level) const {
  if (level == 0) return scaled(base_channels);
  const std::int64_t factor = std::min<std::int64_t>(std::int64_t{1} << (level - 1), 8);
  return scaled(base_channels * factor);
}

// ---------------------------------------------------------------------------

ConvBlockImpl::ConvBlockImpl(std::int64_t in, std::int64_t out, std::int64_t kernel,
                             std::int64_t stride, bool norm, bool activate, double slope)
    : pad_((kernel - 1) / 2),
      slope_(slope),
      activate_(activate) {
  conv_ = register_module(
      "conv", torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, kernel).stride(stride).bias(!norm)));
  if (norm) bn_ = register_module("bn", torch::nn::BatchNorm2d(out));
}

torch::Tensor ConvBlockImpl::forward(torch::Tensor x) {
  if (pad_ > 0) x = F::pad(x, F::PadFuncOptions({pad_, pad_, pad_, pad_}).mode(torch::kReflect));
  x = conv_(x);
  if (bn_) x = bn_(x);
  if (activate_) x = torch::leaky_relu(x, slope_);
  return x;
}

UpBlockImpl::UpBlockImpl(std::int64_t in, std::int64_t out, bool norm, double slope) : slope_(slope) {
  deconv_ = register_module(
      "deconv",
      torch::nn::ConvTranspose2d(torch::nn::ConvTranspose2dOptions(in, out, 4).stride(2).padding(1).bias(!norm)));
  if (norm) bn_ = register_module("bn", torch::nn::BatchNorm2d(out));
}

torch::Tensor UpBlockImpl::forward(torch::Tensor x) {
  x = deconv_(x);
  if (bn_) x = bn_(x);
  return torch::leaky_relu(x, slope_);
}

// ---------------------------------------------------------------------------

GlobalEncoderImpl::GlobalEncoderImpl(const GeneratorConfig& config) {
  // VGG-16 blocks; the trailing entry of each block is the stride-2 conv that
  // replaces the pooling layer.
  const std::vector<std::vector<std::int64_t>> blocks = {
      {64, 64}, {128, 128}, {256, 256, 256}, {512, 512, 512}, {512, 512, 512}};
  std::int64_t in = 1;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const bool last_block = b + 1 == blocks.size();
    for (std::size_t i = 0; i < blocks[b].size(); ++i) {
      const std::int64_t out = config.scaled(blocks[b][i]);
      const bool input_layer = b == 0 && i == 0;
      const auto name = "conv" + std::to_string(b + 1) + "_" + std::to_string(i + 1);
      layers_.push_back(register_module(
          name, ConvBlock(in, out, 3, 1, config.batch_norm && !input_layer, true, config.leaky_slope)));
      in = out;
    }
    const std::int64_t out = last_block ? config.global_feature_channels : in;
    layers_.push_back(register_module("down" + std::to_string(b + 1),
                                      ConvBlock(in, out, 3, 2, config.batch_norm, true, config.leaky_slope)));
    in = out;
  }
  out_channels_ = in;
}

torch::Tensor GlobalEncoderImpl::forward(torch::Tensor x) {
  for (auto& layer : layers_) x = layer(x);
  return x;
}

// ---------------------------------------------------------------------------

GeneratorImpl::GeneratorImpl(GeneratorConfig config) : config_(std::move(config)) {
  config_.validate();
  const int depth = config_.encoder_depth;
  const bool bn = config_.batch_norm;
  const double slope = config_.leaky_slope;

  input_conv_ = register_module("input_conv", ConvBlock(1, config_.level_channels(0), 3, 1, false, true, slope));
  for (int level = 1; level <= depth; ++level) {
    down_.push_back(register_module(
        "down" + std::to_string(level),
        ConvBlock(config_.level_channels(level - 1), config_.level_channels(level), 4, 2, bn, true, slope)));
  }

  std::int64_t bottleneck = config_.level_channels(depth);
  if (config_.use_global_encoder) {
    global_ = register_module("global_encoder", GlobalEncoder(config_));
    bottleneck += global_->out_channels();
  }

  up_.resize(depth, nullptr);
  fuse_.resize(depth, nullptr);
  for (int level = depth - 1; level >= 0; --level) {
    const std::int64_t in = level == depth - 1 ? bottleneck : config_.level_channels(level + 1);
    const std::int64_t out = config_.level_channels(level);
    up_[level] = register_module("up" + std::to_string(level), UpBlock(in, out, bn, slope));
    fuse_[level] = register_module("fuse" + std::to_string(level),
                                   ConvBlock(2 * out, out, 3, 1, bn, true, slope));
  }

  color_head_ = register_module(
      "color_head", torch::nn::Conv2d(torch::nn::Conv2dOptions(config_.level_channels(0), 3, 3)));
  const std::int64_t tap_channels =
      config_.level_channels(0) + config_.level_channels(1) + config_.level_channels(2);
  saliency_head_ =
      register_module("saliency_head", torch::nn::Conv2d(torch::nn::Conv2dOptions(tap_channels, 1, 1)));
}

GeneratorOutput GeneratorImpl::forward(const torch::Tensor& gray) {
  if (gray.dim() != 4 || gray.size(1) != 1 || gray.size(2) != config_.input_size ||
      gray.size(3) != config_.input_size) {
    throw ShapeError(c10::str("generator: expected input [N,1,", config_.input_size, ",",
                              config_.input_size, "], got ", gray.sizes()));
  }
  return run(gray);
}

GeneratorOutput GeneratorImpl::forward_any_size(const torch::Tensor& gray) {
  const std::int64_t unit = std::int64_t{1} << config_.encoder_depth;
  if (gray.dim() != 4 || gray.size(1) != 1 || gray.size(2) % unit != 0 || gray.size(3) % unit != 0 ||
      gray.size(2) == 0 || gray.size(3) == 0) {
    throw ShapeError(c10::str("generator: input ", gray.sizes(), " must be [N,1,H,W] with H, W multiples of ",
                              unit));
  }
  return run(gray);
}

torch::Tensor GeneratorImpl::global_features(const torch::Tensor& gray) {
  if (!global_) throw ConfigError("generator was built without a global encoder");
  if (gray.dim() != 4 || gray.size(1) != 1 || gray.size(2) != config_.input_size ||
      gray.size(3) != config_.input_size) {
    throw ShapeError(c10::str("global encoder: expected input [N,1,", config_.input_size, ",",
                              config_.input_size, "], got ", gray.sizes()));
  }
  return global_(gray);
}

GeneratorOutput GeneratorImpl::run(const torch::Tensor& gray) {
  const int depth = config_.encoder_depth;
  std::vector<torch::Tensor> skips;
  skips.reserve(depth);
  torch::Tensor h = input_conv_(gray);
  skips.push_back(h);
  for (int i = 0; i < depth; ++i) {
    h = down_[i](h);
    if (i + 1 < depth) skips.push_back(h);
  }
  if (global_) h = torch::cat({h, global_(gray)}, 1);

  std::vector<torch::Tensor> decoded(depth);
  for (int level = depth - 1; level >= 0; --level) {
    h = up_[level](h);
    h = fuse_[level](torch::cat({h, skips[level]}, 1));
    decoded[level] = h;
  }

  auto padded = F::pad(decoded[0], F::PadFuncOptions({1, 1, 1, 1}).mode(torch::kReflect));
  torch::Tensor color = torch::tanh(color_head_(padded));

  const std::vector<std::int64_t> full = {gray.size(2), gray.size(3)};
  std::vector<torch::Tensor> taps;
  for (int level : {2, 1, 0}) {
    if (level == 0) {
      taps.push_back(decoded[0]);
    } else {
      taps.push_back(F::interpolate(
          decoded[level],
          F::InterpolateFuncOptions().size(full).mode(torch::kBilinear).align_corners(false)));
    }
  }
  torch::Tensor saliency = torch::sigmoid(saliency_head_(torch::cat(taps, 1)));
  return {color, saliency};
}

void init_gaussian(torch::nn::Module& module, double stddev, torch::Generator& gen) {
  torch::NoGradGuard no_grad;
  for (auto& m : module.modules(/*include_self=*/true)) {
    if (auto* conv = m->as<torch::nn::Conv2d>()) {
      conv->weight.normal_(0.0, stddev, gen);
      if (conv->bias.defined()) conv->bias.zero_();
    } else if (auto* deconv = m->as<torch::nn::ConvTranspose2d>()) {
      deconv->weight.normal_(0.0, stddev, gen);
      if (deconv->bias.defined()) deconv->bias.zero_();
    } else if (auto* bn = m->as<torch::nn::BatchNorm2d>()) {
      bn->weight.fill_(1.0);
      bn->bias.zero_();
    }
  }
}

namespace {

void init_kaiming(torch::nn::Module& module, double slope, torch::Generator& gen) {
  torch::NoGradGuard no_grad;
  const double gain2 = 2.0 / (1.0 + slope * slope);
  for (auto& m : module.modules(true)) {
    if (auto* conv = m->as<torch::nn::Conv2d>()) {
      const double fan_in = static_cast<double>(conv->weight[0].numel());
      conv->weight.normal_(0.0, std::sqrt(gain2 / fan_in), gen);
      if (conv->bias.defined()) conv->bias.zero_();
    } else if (auto* bn = m->as<torch::nn::BatchNorm2d>()) {
      bn->weight.fill_(1.0);
      bn->bias.zero_();
    }
  }
}

}  // namespace

void GeneratorImpl::init_parameters(std::uint64_t seed, GlobalInit global_init) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  for (auto& child : named_children()) {
    if (child.key() == "global_encoder") continue;
    init_gaussian(*child.value(), 0.02, gen);
  }
  if (global_) {
    // Separate stream so toggling the global init policy leaves the
    // mainstream weights identical.
    auto global_gen = at::make_generator<at::CPUGeneratorImpl>(seed ^ 0x9e3779b97f4a7c15ULL);
    if (global_init == GlobalInit::Gaussian) {
      init_gaussian(*global_, 0.02, global_gen);
    } else {
      init_kaiming(*global_, config_.leaky_slope, global_gen);
    }
  }
}

void GeneratorImpl::load_global_encoder_weights(const std::filesystem::path& manifest) {
  if (!global_) throw ConfigError("generator was built without a global encoder");
  load_module_state(*global_, load_weight_manifest(manifest));
}

void GeneratorImpl::save_global_encoder_weights(const std::filesystem::path& manifest) const {
  if (!global_) throw ConfigError("generator was built without a global encoder");
  save_module(manifest, *global_);
}

std::int64_t GeneratorImpl::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& p : parameters()) n += p.numel();
  return n;
}

}  // namespace scgan
