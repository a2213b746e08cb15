#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <torch/torch.h>

namespace scgan {

struct GeneratorConfig {
  int input_size = 256;
  int base_channels = 64;
  double width_multiplier = 1.0;
  /// Stride-2 stages in the colorization encoder; bottleneck is input / 2^depth.
  int encoder_depth = 5;
  int global_feature_channels = 512;
  bool use_global_encoder = true;
  bool batch_norm = true;
  double leaky_slope = 0.2;

  /// Throws ConfigError when the configuration cannot be built.
  void validate() const;
  /// Channel count after applying the width multiplier (at least 1).
  [[nodiscard]] std::int64_t scaled(std::int64_t channels) const;
  /// Output channels of encoder stage `level` (0 = full-resolution input conv).
  [[nodiscard]] std::int64_t level_channels(int level) const;
};

/// How the global encoder is initialized when no manifest is loaded.
enum class GlobalInit {
  /// Kaiming-normal seeded init: stands in for pretrained weights.
  Seeded,
  /// Zero-mean Gaussian with std 0.02, like the rest of the network.
  Gaussian,
};

/// Convolution with reflection padding, optional batch norm and LeakyReLU.
class ConvBlockImpl : public torch::nn::Module {
 public:
  ConvBlockImpl(std::int64_t in, std::int64_t out, std::int64_t kernel, std::int64_t stride,
                bool norm, bool activate, double slope);
  torch::Tensor forward(torch::Tensor x);

 private:
  std::int64_t pad_;
  double slope_;
  bool activate_;
  torch::nn::Conv2d conv_{nullptr};
  torch::nn::BatchNorm2d bn_{nullptr};
};
TORCH_MODULE(ConvBlock);

/// 2x transposed-convolution upsampling with batch norm and LeakyReLU.
class UpBlockImpl : public torch::nn::Module {
 public:
  UpBlockImpl(std::int64_t in, std::int64_t out, bool norm, double slope);
  torch::Tensor forward(torch::Tensor x);

 private:
  double slope_;
  torch::nn::ConvTranspose2d deconv_{nullptr};
  torch::nn::BatchNorm2d bn_{nullptr};
};
TORCH_MODULE(UpBlock);

/// VGG-16 layer plan on a single-channel input with each max-pool replaced by
/// a stride-2 convolution. Output grid is input / 32.
class GlobalEncoderImpl : public torch::nn::Module {
 public:
  explicit GlobalEncoderImpl(const GeneratorConfig& config);
  torch::Tensor forward(torch::Tensor x);

  [[nodiscard]] std::int64_t out_channels() const { return out_channels_; }

 private:
  std::vector<ConvBlock> layers_;
  std::int64_t out_channels_;
};
TORCH_MODULE(GlobalEncoder);

struct GeneratorOutput {
  torch::Tensor color;     // [N,3,H,W] in [-1, 1]
  torch::Tensor saliency;  // [N,1,H,W] in [0, 1]
};

class GeneratorImpl : public torch::nn::Module {
 public:
  explicit GeneratorImpl(GeneratorConfig config);

  /// Training/eval forward. Input must be [N,1,S,S] with S = config.input_size.
  GeneratorOutput forward(const torch::Tensor& gray);

  /// Forward on any spatial size divisible by 2^encoder_depth (inference path).
  GeneratorOutput forward_any_size(const torch::Tensor& gray);

  /// Global features for a [N,1,S,S] input. Requires use_global_encoder.
  torch::Tensor global_features(const torch::Tensor& gray);

  /// Conv weights ~ N(0, 0.02^2), biases 0, batch-norm affine (1, 0).
  /// The global encoder follows `global_init`.
  void init_parameters(std::uint64_t seed, GlobalInit global_init = GlobalInit::Seeded);

  /// Replaces global-encoder parameters from a weight manifest; everything
  /// else is left untouched.
  void load_global_encoder_weights(const std::filesystem::path& manifest);
  void save_global_encoder_weights(const std::filesystem::path& manifest) const;

  [[nodiscard]] const GeneratorConfig& config() const { return config_; }
  [[nodiscard]] bool has_global_encoder() const { return !global_.is_empty(); }
  [[nodiscard]] GlobalEncoder global_encoder() const { return global_; }
  [[nodiscard]] std::int64_t parameter_count() const;

 private:
  GeneratorOutput run(const torch::Tensor& gray);

  GeneratorConfig config_;
  ConvBlock input_conv_{nullptr};
  std::vector<ConvBlock> down_;  // down_[i] produces level i + 1
  GlobalEncoder global_{nullptr};
  std::vector<UpBlock> up_;      // up_[l] produces level l from level l + 1
  std::vector<ConvBlock> fuse_;  // fuse_[l] merges the level-l skip
  torch::nn::Conv2d color_head_{nullptr};
  torch::nn::Conv2d saliency_head_{nullptr};
};
TORCH_MODULE(Generator);

/// Zero-mean Gaussian init over every conv / transposed-conv in `module`.
void init_gaussian(torch::nn::Module& module, double stddev, torch::Generator& gen);

}  // namespace scgan
