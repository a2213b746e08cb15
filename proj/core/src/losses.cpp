#include "scgan/losses.hpp"

#include <cmath>

#include "scgan/error.hpp"

namespace scgan {

namespace {

void require_same_shape(const torch::Tensor& a, const torch::Tensor& b, const char* op) {
  if (a.sizes() != b.sizes()) {
    throw ShapeError(c10::str(op, ": shape mismatch ", a.sizes(), " vs ", b.sizes()));
  }
}

double value_or_zero(const torch::Tensor& t) { return t.defined() ? t.detach().item<double>() : 0.0; }

}  // namespace

void LossWeights::validate() const {
  if (lambda_g < 0 || lambda_a < 0 || lambda_p < 0 || gp_lambda < 0) {
    throw ConfigError("loss weights must be non-negative");
  }
}

bool LossBreakdown::all_finite() const {
  for (double v : {l1, attention, adv_g, perceptual, total, adv_d, gp_c, gp_a}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

torch::Tensor pixel_loss(const torch::Tensor& pred, const torch::Tensor& target, PixelMode mode) {
  require_same_shape(pred, target, "pixel_loss");
  const auto diff = pred - target;
  return mode == PixelMode::L1 ? diff.abs().mean() : diff.square().mean();
}

torch::Tensor attention_loss(const torch::Tensor& pred_color, const torch::Tensor& pred_saliency,
                             const torch::Tensor& gt_color, const torch::Tensor& gt_saliency) {
  require_same_shape(pred_color, gt_color, "attention_loss");
  require_same_shape(pred_saliency, gt_saliency, "attention_loss");
  if (pred_saliency.dim() != pred_color.dim() || pred_saliency.size(-1) != pred_color.size(-1) ||
      pred_saliency.size(-2) != pred_color.size(-2)) {
    throw ShapeError(c10::str("attention_loss: saliency ", pred_saliency.sizes(), " does not match color ",
                              pred_color.sizes()));
  }
  return (pred_color * pred_saliency - gt_color * gt_saliency).abs().mean();
}

torch::Tensor generator_adv_loss(const torch::Tensor& dc_fake, const torch::Tensor& da_fake, AdvMode mode) {
  auto term = [mode](const torch::Tensor& d) {
    return mode == AdvMode::WGAN ? -d.mean() : 0.5 * (d - 1.0).square().mean();
  };
  torch::Tensor loss = term(dc_fake);
  if (da_fake.defined()) loss = loss + term(da_fake);
  return loss;
}

torch::Tensor gradient_penalty(const CriticFn& critic, const torch::Tensor& real, const torch::Tensor& fake,
                               double gp_lambda, torch::Generator& gen) {
  require_same_shape(real, fake, "gradient_penalty");
  if (gp_lambda == 0.0) return torch::zeros({}, real.options());
  const auto n = real.size(0);
  std::vector<std::int64_t> eps_shape(real.dim(), 1);
  eps_shape[0] = n;
  const auto eps = torch::rand(eps_shape, gen, real.options().requires_grad(false));
  auto interp = (eps * real.detach() + (1.0 - eps) * fake.detach()).requires_grad_(true);

  const auto scores = critic(interp);
  if (!scores.requires_grad()) {
    throw Error("gradient_penalty: critic output does not depend differentiably on its input");
  }
  const auto per_sample = scores.reshape({n, -1}).mean(1);
  const auto grads = torch::autograd::grad({per_sample.sum()}, {interp}, {}, /*retain_graph=*/true,
                                           /*create_graph=*/true)[0];
  const auto norms = grads.reshape({n, -1}).norm(2, 1);
  return gp_lambda * (norms - 1.0).square().mean();
}

torch::Tensor critic_loss(const CriticScores& s, const torch::Tensor& gp_c, const torch::Tensor& gp_a,
                          AdvMode mode) {
  const bool attention = s.da_real.defined() && s.da_fake.defined();
  if (mode == AdvMode::WGAN) {
    torch::Tensor loss = s.dc_fake.mean() - s.dc_real.mean();
    if (attention) loss = loss + s.da_fake.mean() - s.da_real.mean();
    if (gp_c.defined()) loss = loss + gp_c;
    if (gp_a.defined()) loss = loss + gp_a;
    return loss;
  }
  auto ls = [](const torch::Tensor& real, const torch::Tensor& fake) {
    return 0.5 * ((real - 1.0).square().mean() + fake.square().mean());
  };
  torch::Tensor loss = ls(s.dc_real, s.dc_fake);
  if (attention) loss = loss + ls(s.da_real, s.da_fake);
  return loss;
}

torch::Tensor perceptual_loss(FeatureExtractor& extractor, const torch::Tensor& pred, const torch::Tensor& gt,
                              const std::string& layer) {
  require_same_shape(pred, gt, "perceptual_loss");
  const auto pred_features = extractor.features(pred, layer);
  torch::Tensor gt_features;
  {
    torch::NoGradGuard no_grad;
    gt_features = extractor.features(gt, layer);
  }
  return (pred_features - gt_features).abs().mean();
}

double compose_total(const LossBreakdown& c, const LossWeights& w, int stage) {
  w.validate();
  if (stage == 1) return c.l1 + w.lambda_a * c.attention;
  if (stage == 2) return c.l1 + w.lambda_g * c.adv_g + w.lambda_a * c.attention + w.lambda_p * c.perceptual;
  throw ConfigError("invalid training stage " + std::to_string(stage));
}

GeneratorLoss total_generator_loss(const GeneratorLossTerms& terms, const LossWeights& weights, int stage) {
  weights.validate();
  if (stage != 1 && stage != 2) throw ConfigError("invalid training stage " + std::to_string(stage));
  if (!terms.pixel.defined()) throw Error("total_generator_loss: pixel term is required");

  GeneratorLoss out;
  out.breakdown.l1 = value_or_zero(terms.pixel);
  out.breakdown.attention = value_or_zero(terms.attention);
  out.total = terms.pixel;
  if (terms.attention.defined()) out.total = out.total + weights.lambda_a * terms.attention;
  if (stage == 2) {
    out.breakdown.adv_g = value_or_zero(terms.adversarial);
    out.breakdown.perceptual = value_or_zero(terms.perceptual);
    if (terms.adversarial.defined()) out.total = out.total + weights.lambda_g * terms.adversarial;
    if (terms.perceptual.defined()) out.total = out.total + weights.lambda_p * terms.perceptual;
  }
  out.breakdown.total = compose_total(out.breakdown, weights, stage);
  return out;
}

}  // namespace scgan
