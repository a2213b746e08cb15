#pragma once

#include <torch/torch.h>

#include "scgan/image.hpp"

namespace scgan {

/// CHW float32 tensor holding a copy of the image.
torch::Tensor to_tensor(const NetImage& img);
torch::Tensor to_tensor(const SaliencyMap& sal);

/// Accepts CHW or 1xCHW tensors of any floating dtype.
NetImage net_image_from_tensor(const torch::Tensor& t);
SaliencyMap saliency_from_tensor(const torch::Tensor& t);

/// Batched saliency weighting: color [N,C,H,W] times saliency [N,1,H,W],
/// broadcast over channels. Differentiable in both arguments.
torch::Tensor weight_by_saliency(const torch::Tensor& color, const torch::Tensor& saliency);

}  // namespace scgan
