#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <torch/torch.h>

namespace scgan {

/// Frozen network exposing named feature layers for the perceptual loss.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;

  /// Activations at `layer` for a [N,3,H,W] image batch in [-1, 1].
  /// Gradients flow to the input, never into the extractor's own weights.
  virtual torch::Tensor features(const torch::Tensor& image, const std::string& layer) = 0;
  [[nodiscard]] virtual std::vector<std::string> layer_names() const = 0;
};

inline constexpr const char* kDefaultPerceptualLayer = "conv3_3";

struct VggExtractorConfig {
  double width_multiplier = 1.0;
  std::uint64_t seed = 0;
  /// Optional weight manifest with entries "conv1_1.weight", "conv1_1.bias", ...
  std::filesystem::path weights;
};

/// VGG-16 convolutional trunk (3x3 convs, ReLU, 2x2 max-pool between blocks).
/// Layer names are conv1_1 ... conv5_3 and refer to ReLU-activated outputs.
/// Without a manifest, weights are a fixed-seed Kaiming-normal draw.
/// Inputs are mapped from [-1, 1] to ImageNet-normalized RGB first.
class VggFeatureExtractor : public FeatureExtractor {
 public:
  explicit VggFeatureExtractor(const VggExtractorConfig& config);

  torch::Tensor features(const torch::Tensor& image, const std::string& layer) override;
  [[nodiscard]] std::vector<std::string> layer_names() const override;

  void to(torch::ScalarType dtype);
  /// Parameters keyed "<layer>.weight" / "<layer>.bias", for oracles and saving.
  [[nodiscard]] std::vector<std::pair<std::string, torch::nn::Conv2d>> convs() const;
  void save(const std::filesystem::path& manifest) const;

 private:
  torch::nn::ModuleDict convs_;
  std::vector<std::string> names_;
};

/// ImageNet channel statistics used to normalize extractor input.
inline constexpr double kImageNetMean[3] = {0.485, 0.456, 0.406};
inline constexpr double kImageNetStd[3] = {0.229, 0.224, 0.225};

}  // namespace scgan
