#include "scgan/spectral_norm.hpp"

#include "scgan/error.hpp"

namespace scgan {

namespace {

constexpr double kEps = 1e-12;

torch::Tensor as_matrix(const torch::Tensor& weight) { return weight.reshape({weight.size(0), -1}); }

torch::Tensor unit(const torch::Tensor& x) { return x / x.norm().clamp_min(kEps); }

}  // namespace

PowerIterationState make_power_iteration_state(const torch::Tensor& weight, torch::Generator& gen) {
  const auto m = as_matrix(weight);
  auto opts = torch::TensorOptions().dtype(weight.scalar_type());
  PowerIterationState s;
  s.u = unit(torch::randn({m.size(0)}, gen, opts));
  s.v = unit(torch::randn({m.size(1)}, gen, opts));
  return s;
}

torch::Tensor spectral_sigma(const torch::Tensor& weight, const PowerIterationState& state) {
  return torch::dot(state.u, torch::mv(as_matrix(weight), state.v));
}

torch::Tensor spectral_normalize(const torch::Tensor& weight, PowerIterationState& state, int iterations) {
  if (weight.dim() < 2) throw ShapeError("spectral_normalize: weight must be at least 2-D");
  {
    torch::NoGradGuard no_grad;
    const auto m = as_matrix(weight.detach());
    for (int i = 0; i < iterations; ++i) {
      state.v.copy_(unit(torch::mv(m.t(), state.u)));
      state.u.copy_(unit(torch::mv(m, state.v)));
    }
  }
  // Clones keep the autograd graph valid when a later forward advances the
  // shared vectors in place before this graph is backpropagated.
  const PowerIterationState frozen{state.u.clone(), state.v.clone()};
  const auto sigma = spectral_sigma(weight, frozen).clamp_min(kEps);
  return weight / sigma;
}

SpectralConv2dImpl::SpectralConv2dImpl(const SpectralConv2dOptions& options) : options_(options) {
  auto conv = torch::nn::Conv2d(
      torch::nn::Conv2dOptions(options.in_channels, options.out_channels, options.kernel));
  weight = register_parameter("weight", conv->weight.detach().clone());
  bias = register_parameter("bias", conv->bias.detach().clone());
  if (options_.spectral_norm) {
    const auto rows = options.out_channels;
    const auto cols = options.in_channels * options.kernel * options.kernel;
    u = register_buffer("u", unit(torch::ones({rows})));
    v = register_buffer("v", unit(torch::ones({cols})));
  }
}

void SpectralConv2dImpl::reset_vectors(torch::Generator& gen) {
  if (!options_.spectral_norm) return;
  torch::NoGradGuard no_grad;
  auto s = make_power_iteration_state(weight, gen);
  u.copy_(s.u);
  v.copy_(s.v);
}

torch::Tensor SpectralConv2dImpl::effective_weight() {
  if (!options_.spectral_norm) return weight;
  PowerIterationState state{u, v};
  return spectral_normalize(weight, state, is_training() ? options_.power_iterations : 0);
}

torch::Tensor SpectralConv2dImpl::forward(const torch::Tensor& x) {
  return torch::conv2d(x, effective_weight(), bias, {options_.stride, options_.stride},
                       {options_.padding, options_.padding});
}

}  // namespace scgan
