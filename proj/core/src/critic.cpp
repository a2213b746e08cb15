#include "scgan/critic.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "scgan/error.hpp"

namespace scgan {

namespace {

constexpr std::int64_t kKernel = 4;
constexpr std::int64_t kPad = 1;

struct LayerPlan {
  std::int64_t in;
  std::int64_t out;
  std::int64_t stride;
};

std::vector<LayerPlan> plan(const CriticConfig& c) {
  auto scaled = [&](std::int64_t ch) {
    return std::max<std::int64_t>(1, std::llround(static_cast<double>(ch) * c.width_multiplier));
  };
  std::vector<LayerPlan> layers;
  std::int64_t in = c.in_channels;
  std::int64_t mult = 1;
  for (int i = 0; i < c.n_strided_layers; ++i) {
    const std::int64_t out = scaled(c.base_channels * mult);
    layers.push_back({in, out, 2});
    in = out;
    mult = std::min<std::int64_t>(mult * 2, 8);
  }
  const std::int64_t out = scaled(c.base_channels * mult);
  layers.push_back({in, out, 1});
  layers.push_back({out, 1, 1});
  return layers;
}

}  // namespace

void CriticConfig::validate() const {
  if (in_channels < 1) throw ConfigError("critic.in_channels must be >= 1");
  if (base_channels < 1) throw ConfigError("critic.base_channels must be >= 1");
  if (!(width_multiplier > 0.0)) throw ConfigError("critic.width_multiplier must be positive");
  if (n_strided_layers < 0) throw ConfigError("critic.n_strided_layers must be >= 0");
  if (power_iterations < 0) throw ConfigError("critic.power_iterations must be >= 0");
}

std::int64_t CriticConfig::output_size(std::int64_t input_size) const {
  std::int64_t s = input_size;
  for (const auto& l : plan(*this)) s = (s + 2 * kPad - kKernel) / l.stride + 1;
  return s;
}

std::int64_t CriticConfig::receptive_field() const {
  std::int64_t rf = 1;
  const auto layers = plan(*this);
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) rf = (rf - 1) * it->stride + kKernel;
  return rf;
}

CriticImpl::CriticImpl(CriticConfig config) : config_(std::move(config)) {
  config_.validate();
  int index = 0;
  for (const auto& l : plan(config_)) {
    SpectralConv2dOptions opts{l.in, l.out, kKernel, l.stride, kPad, config_.spectral_norm,
                               config_.power_iterations};
    layers_.push_back(register_module("conv" + std::to_string(index++), SpectralConv2d(opts)));
  }
}

torch::Tensor CriticImpl::forward(const torch::Tensor& x) {
  if (x.dim() != 4 || x.size(1) != config_.in_channels) {
    throw ShapeError(c10::str("critic: expected [N,", config_.in_channels, ",H,W], got ", x.sizes()));
  }
  if (config_.output_size(std::min(x.size(2), x.size(3))) < 1) {
    throw ShapeError(c10::str("critic: input ", x.sizes(), " is too small for the patch stack"));
  }
  torch::Tensor h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i](h);
    if (i + 1 < layers_.size()) h = torch::leaky_relu(h, config_.leaky_slope);
  }
  return h;
}

void CriticImpl::init_parameters(std::uint64_t seed) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  torch::NoGradGuard no_grad;
  for (auto& layer : layers_) {
    layer->weight.normal_(0.0, 0.02, gen);
    layer->bias.zero_();
    layer->reset_vectors(gen);
  }
}

}  // namespace scgan
