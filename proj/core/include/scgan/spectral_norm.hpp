#pragma once

#include <cstdint>

#include <torch/torch.h>

namespace scgan {

/// Persistent singular-vector estimates for one weight matrix.
struct PowerIterationState {
  torch::Tensor u;  // [rows]
  torch::Tensor v;  // [cols]
};

/// Random unit vectors sized for a kernel reshaped to [out, in * kh * kw].
PowerIterationState make_power_iteration_state(const torch::Tensor& weight, torch::Generator& gen);

/// Runs `iterations` power-iteration steps (updating `state` in place, outside
/// autograd) and returns weight / sigma, where sigma = u^T W v. The division is
/// differentiable w.r.t. `weight`. Sigma is floored at 1e-12, so an all-zero
/// weight comes back unchanged.
torch::Tensor spectral_normalize(const torch::Tensor& weight, PowerIterationState& state, int iterations);

/// Current top-singular-value estimate u^T W v (no iteration).
torch::Tensor spectral_sigma(const torch::Tensor& weight, const PowerIterationState& state);

struct SpectralConv2dOptions {
  std::int64_t in_channels;
  std::int64_t out_channels;
  std::int64_t kernel;
  std::int64_t stride = 1;
  std::int64_t padding = 0;
  bool spectral_norm = true;
  int power_iterations = 1;
};

/// Conv2d whose kernel is spectrally normalized on every forward. In training
/// mode each forward advances the power iteration; in eval mode the stored
/// vectors are used as-is.
class SpectralConv2dImpl : public torch::nn::Module {
 public:
  explicit SpectralConv2dImpl(const SpectralConv2dOptions& options);
  torch::Tensor forward(const torch::Tensor& x);

  /// Kernel as used by the most recent forward (normalized when enabled).
  torch::Tensor effective_weight();
  void reset_vectors(torch::Generator& gen);

  torch::Tensor weight;
  torch::Tensor bias;
  torch::Tensor u;
  torch::Tensor v;

 private:
  SpectralConv2dOptions options_;
};
TORCH_MODULE(SpectralConv2d);

}  // namespace scgan
