#include "scgan/tensor_bridge.hpp"

#include <cstring>
#include <string>

#include "scgan/error.hpp"

namespace scgan {

namespace {

template <class Tag>
torch::Tensor planar_to_tensor(const PlanarImage<Tag>& img) {
  torch::Tensor t = torch::empty({img.channels, img.height, img.width}, torch::kFloat32);
  std::memcpy(t.data_ptr<float>(), img.data.data(), img.data.size() * sizeof(float));
  return t;
}

template <class Tag>
PlanarImage<Tag> planar_from_tensor(const torch::Tensor& t) {
  torch::Tensor chw = t.dim() == 4 ? t.squeeze(0) : t;
  if (chw.dim() != 3) {
    throw ShapeError("expected a CHW tensor, got " + std::to_string(t.dim()) + " dims");
  }
  chw = chw.detach().to(torch::kCPU, torch::kFloat32).contiguous();
  PlanarImage<Tag> img(static_cast<int>(chw.size(0)), static_cast<int>(chw.size(1)),
                       static_cast<int>(chw.size(2)));
  std::memcpy(img.data.data(), chw.data_ptr<float>(), img.data.size() * sizeof(float));
  return img;
}

}  // namespace

torch::Tensor to_tensor(const NetImage& img) { return planar_to_tensor(img); }
torch::Tensor to_tensor(const SaliencyMap& sal) { return planar_to_tensor(sal); }

NetImage net_image_from_tensor(const torch::Tensor& t) {
  return planar_from_tensor<NetImageTag>(t);
}

SaliencyMap saliency_from_tensor(const torch::Tensor& t) {
  auto s = planar_from_tensor<SaliencyTag>(t);
  if (s.channels != 1) throw ShapeError("saliency tensor must have one channel");
  return s;
}

torch::Tensor weight_by_saliency(const torch::Tensor& color, const torch::Tensor& saliency) {
  if (color.dim() != 4 || saliency.dim() != 4 || saliency.size(1) != 1 ||
      color.size(0) != saliency.size(0) || color.size(2) != saliency.size(2) ||
      color.size(3) != saliency.size(3)) {
    throw ShapeError(c10::str("weight_by_saliency: color ", color.sizes(),
                              " incompatible with saliency ", saliency.sizes()));
  }
  return color * saliency;
}

}  // namespace scgan
