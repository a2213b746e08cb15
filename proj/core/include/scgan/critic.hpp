#pragma once

#include <cstdint>
#include <vector>

#include <torch/torch.h>

#include "scgan/spectral_norm.hpp"

namespace scgan {

struct CriticConfig {
  int in_channels = 3;
  int base_channels = 64;
  double width_multiplier = 1.0;
  /// Stride-2 layers before the stride-1 layer and the output conv.
  int n_strided_layers = 3;
  bool spectral_norm = true;
  int power_iterations = 1;
  double leaky_slope = 0.2;

  void validate() const;
  /// Side length of the score grid for a square input.
  [[nodiscard]] std::int64_t output_size(std::int64_t input_size) const;
  /// Receptive field of one output score, in input pixels.
  [[nodiscard]] std::int64_t receptive_field() const;
};

/// Fully convolutional patch critic with 4x4 kernels: C64-C128-C256 at
/// stride 2, C512 at stride 1, then a one-channel stride-1 conv. No output
/// activation and no batch norm.
class CriticImpl : public torch::nn::Module {
 public:
  explicit CriticImpl(CriticConfig config);

  /// [N,C,H,W] -> [N,1,h,w] unbounded patch scores.
  torch::Tensor forward(const torch::Tensor& x);

  /// N(0, 0.02^2) kernels, zero biases, fresh power-iteration vectors.
  void init_parameters(std::uint64_t seed);

  [[nodiscard]] const CriticConfig& config() const { return config_; }
  [[nodiscard]] const std::vector<SpectralConv2d>& layers() const { return layers_; }

 private:
  CriticConfig config_;
  std::vector<SpectralConv2d> layers_;
};
TORCH_MODULE(Critic);

}  // namespace scgan
