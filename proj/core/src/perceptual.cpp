#include "scgan/perceptual.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <algorithm>
#include <cmath>

#include "scgan/error.hpp"
#include "scgan/weights.hpp"

namespace scgan {

namespace {

const std::vector<std::vector<std::int64_t>>& vgg16_blocks() {
  static const std::vector<std::vector<std::int64_t>> blocks = {
      {64, 64}, {128, 128}, {256, 256, 256}, {512, 512, 512}, {512, 512, 512}};
  return blocks;
}

}  // namespace

VggFeatureExtractor::VggFeatureExtractor(const VggExtractorConfig& config) {
  convs_ = torch::nn::ModuleDict();
  std::int64_t in = 3;
  auto gen = at::make_generator<at::CPUGeneratorImpl>(config.seed);
  for (std::size_t b = 0; b < vgg16_blocks().size(); ++b) {
    for (std::size_t i = 0; i < vgg16_blocks()[b].size(); ++i) {
      const std::int64_t out = std::max<std::int64_t>(
          1, std::llround(static_cast<double>(vgg16_blocks()[b][i]) * config.width_multiplier));
      const auto name = "conv" + std::to_string(b + 1) + "_" + std::to_string(i + 1);
      torch::nn::Conv2d conv(torch::nn::Conv2dOptions(in, out, 3).padding(1));
      {
        torch::NoGradGuard no_grad;
        conv->weight.normal_(0.0, std::sqrt(2.0 / static_cast<double>(in * 9)), gen);
        conv->bias.zero_();
      }
      convs_->update(std::vector<std::pair<std::string, std::shared_ptr<torch::nn::Module>>>{{name, conv.ptr()}});
      names_.push_back(name);
      in = out;
    }
  }
  if (!config.weights.empty()) {
    NamedTensors arrays = load_weight_manifest(config.weights);
    torch::NoGradGuard no_grad;
    for (auto& [name, conv] : convs()) {
      for (const char* part : {"weight", "bias"}) {
        const auto key = name + "." + part;
        auto& target = std::string(part) == "weight" ? conv->weight : conv->bias;
        const auto it = arrays.find(key);
        if (it == arrays.end()) {
          // Manifests may stop early (e.g. only up to conv3_3); later layers keep the seeded draw.
          continue;
        }
        if (it->second.sizes() != target.sizes()) {
          throw ShapeError(c10::str("perceptual extractor: shape mismatch for layer '", key, "': expected ",
                                    target.sizes(), ", manifest has ", it->second.sizes()));
        }
        target.copy_(it->second);
      }
    }
  }
  for (auto& p : convs_->parameters()) p.set_requires_grad(false);
  convs_->eval();
}

std::vector<std::pair<std::string, torch::nn::Conv2d>> VggFeatureExtractor::convs() const {
  std::vector<std::pair<std::string, torch::nn::Conv2d>> out;
  for (const auto& name : names_) {
    out.emplace_back(name, torch::nn::Conv2d(std::dynamic_pointer_cast<torch::nn::Conv2dImpl>((*convs_.ptr())[name])));
  }
  return out;
}

std::vector<std::string> VggFeatureExtractor::layer_names() const { return names_; }

void VggFeatureExtractor::to(torch::ScalarType dtype) { convs_->to(dtype); }

void VggFeatureExtractor::save(const std::filesystem::path& manifest) const {
  save_weight_manifest(manifest, module_state(*convs_));
}

torch::Tensor VggFeatureExtractor::features(const torch::Tensor& image, const std::string& layer) {
  if (std::find(names_.begin(), names_.end(), layer) == names_.end()) {
    throw ConfigError("perceptual extractor: unknown layer '" + layer + "'");
  }
  if (image.dim() != 4 || image.size(1) != 3) {
    throw ShapeError(c10::str("perceptual extractor: expected [N,3,H,W], got ", image.sizes()));
  }
  auto opts = torch::TensorOptions().dtype(image.scalar_type());
  const auto mean = torch::tensor({kImageNetMean[0], kImageNetMean[1], kImageNetMean[2]}, opts).view({1, 3, 1, 1});
  const auto stdv = torch::tensor({kImageNetStd[0], kImageNetStd[1], kImageNetStd[2]}, opts).view({1, 3, 1, 1});
  torch::Tensor h = ((image + 1.0) * 0.5 - mean) / stdv;

  std::size_t index = 0;
  for (std::size_t b = 0; b < vgg16_blocks().size(); ++b) {
    if (b > 0) h = torch::max_pool2d(h, 2, 2);
    for (std::size_t i = 0; i < vgg16_blocks()[b].size(); ++i, ++index) {
      h = torch::relu(convs_[names_[index]]->as<torch::nn::Conv2dImpl>()->forward(h));
      if (names_[index] == layer) return h;
    }
  }
  return h;
}

}  // namespace scgan
