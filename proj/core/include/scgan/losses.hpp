#pragma once

#include <functional>
#include <string>

#include <torch/torch.h>

#include "scgan/perceptual.hpp"

namespace scgan {

enum class PixelMode { L1, L2 };
enum class AdvMode { WGAN, LSGAN };

struct LossWeights {
  double lambda_g = 0.05;
  double lambda_a = 0.5;
  double lambda_p = 5.0;
  double gp_lambda = 10.0;

  void validate() const;
};

/// Scalar loss values of one optimization step. Generator side: l1 (pixel
/// loss, whichever mode), attention, adv_g, perceptual, total. Critic side:
/// adv_d (full critic objective including penalties), gp_c, gp_a.
struct LossBreakdown {
  double l1 = 0.0;
  double attention = 0.0;
  double adv_g = 0.0;
  double perceptual = 0.0;
  double total = 0.0;
  double adv_d = 0.0;
  double gp_c = 0.0;
  double gp_a = 0.0;

  [[nodiscard]] bool all_finite() const;
};

/// Mean absolute (L1) or mean squared (L2) elementwise difference.
torch::Tensor pixel_loss(const torch::Tensor& pred, const torch::Tensor& target, PixelMode mode = PixelMode::L1);

/// Mean absolute difference between pred_c * pred_s and gt_c * gt_s.
torch::Tensor attention_loss(const torch::Tensor& pred_color, const torch::Tensor& pred_saliency,
                             const torch::Tensor& gt_color, const torch::Tensor& gt_saliency);

/// WGAN: -mean(dc) - mean(da). LSGAN: 0.5 mean((dc-1)^2) + 0.5 mean((da-1)^2).
/// An undefined `da` (attention critic disabled) contributes nothing.
torch::Tensor generator_adv_loss(const torch::Tensor& dc_fake, const torch::Tensor& da_fake, AdvMode mode);

using CriticFn = std::function<torch::Tensor(const torch::Tensor&)>;

/// gp_lambda * mean_n (||d critic_n(x_hat) / d x_hat_n||_2 - 1)^2 with
/// x_hat = eps * real + (1 - eps) * fake, eps ~ U[0,1] per sample. The patch
/// map is averaged to one score per sample before differentiation. The graph
/// is kept so the penalty can be backpropagated into the critic.
torch::Tensor gradient_penalty(const CriticFn& critic, const torch::Tensor& real, const torch::Tensor& fake,
                               double gp_lambda, torch::Generator& gen);

/// Patch scores of both critics on real and generated inputs. The attention
/// pair may be left undefined when that critic is disabled.
struct CriticScores {
  torch::Tensor dc_real;
  torch::Tensor dc_fake;
  torch::Tensor da_real;
  torch::Tensor da_fake;
};

/// WGAN: mean(dc_fake) + mean(da_fake) - mean(dc_real) - mean(da_real) + gp_c + gp_a.
/// LSGAN: 0.5 [mean((d_real-1)^2) + mean(d_fake^2)] summed over both critics; penalties ignored.
torch::Tensor critic_loss(const CriticScores& scores, const torch::Tensor& gp_c, const torch::Tensor& gp_a,
                          AdvMode mode);

/// Mean absolute difference of extractor features at `layer`.
torch::Tensor perceptual_loss(FeatureExtractor& extractor, const torch::Tensor& pred, const torch::Tensor& gt,
                              const std::string& layer = kDefaultPerceptualLayer);

/// Generator loss components; undefined tensors count as zero.
struct GeneratorLossTerms {
  torch::Tensor pixel;
  torch::Tensor attention;
  torch::Tensor adversarial;
  torch::Tensor perceptual;
};

struct GeneratorLoss {
  torch::Tensor total;  // differentiable
  LossBreakdown breakdown;
};

/// Stage 1: pixel + lambda_a * attention (adversarial and perceptual forced
/// to zero). Stage 2: pixel + lambda_g * adv + lambda_a * attention +
/// lambda_p * perceptual. breakdown.total is recomposed in double from the
/// logged components.
GeneratorLoss total_generator_loss(const GeneratorLossTerms& terms, const LossWeights& weights, int stage);

/// Weighted sum over already-reduced components, same stage rules as above.
double compose_total(const LossBreakdown& components, const LossWeights& weights, int stage);

}  // namespace scgan
