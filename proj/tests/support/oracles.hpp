#pragma once

// Independent reference implementations used only by tests. Each one is a
// deliberately naive restatement of the quantity it checks.

#include <cstdint>
#include <functional>
#include <random>

#include <torch/torch.h>

#include "scgan/image.hpp"

namespace scgan::oracle {

/// Colorfulness from a per-pixel scalar loop: population statistics of
/// rg = R - G and yb = (R + G) / 2 - B, then sigma + 0.3 * mu.
double cci_scalar(const Image8& img);

/// True when the scalar-loop CCI lies in [16, 20].
bool cci_in_optimum(const Image8& img);

/// SSIM evaluated window by window with an explicit 2-D Gaussian, on
/// 0.299 R + 0.587 G + 0.114 B luma.
double ssim_windowed(const Image8& a, const Image8& b, int window = 11, double sigma = 1.5);

/// SSIM of two constant images with levels `a` and `b` (variances vanish).
double ssim_constant(double a, double b, double k1 = 0.01, double k2 = 0.03, double range = 255.0);

/// Direct-loop 2-D convolution (cross-correlation), zero padding.
torch::Tensor conv2d_loops(const torch::Tensor& input, const torch::Tensor& weight, const torch::Tensor& bias,
                           int stride, int padding);

/// 2x2 max pooling with stride 2, by loops.
torch::Tensor maxpool2_loops(const torch::Tensor& input);

/// color * saliency, element by element with broadcasting over channels.
torch::Tensor weighted_product_loops(const torch::Tensor& color, const torch::Tensor& saliency);

/// Largest singular value of a kernel reshaped to [out, in * kh * kw] (full SVD).
double top_singular_value(const torch::Tensor& weight);

/// Central difference (f(p + h) - f(p - h)) / 2h for one element of `param`.
double central_difference(const std::function<double()>& f, torch::Tensor& param, std::int64_t flat_index,
                          double h);

/// Random RGB image with independent uniform channels.
Image8 random_image(int h, int w, int c, std::mt19937_64& rng, int lo = 0, int hi = 255);

}  // namespace scgan::oracle
