#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scgan/config.hpp"
#include "scgan/critic.hpp"
#include "scgan/error.hpp"
#include "scgan/spectral_norm.hpp"

using namespace scgan;

namespace {

CriticConfig toy() { return toy_run_config().critic; }

}  // namespace

TEST(Critic, OutputSizeFormulaMatchesForward) {
  Critic d(toy());
  d->init_parameters(0);
  for (int s : {32, 64, 128}) {
    const auto out = d->forward(torch::zeros({1, 3, s, s}));
    EXPECT_EQ(out.size(2), toy().output_size(s)) << s;
    EXPECT_EQ(out.size(1), 1);
  }
  EXPECT_EQ(toy().output_size(256), 30);
  EXPECT_EQ(toy().receptive_field(), 70);
}

TEST(Critic, RejectsBadInput) {
  Critic d(toy());
  EXPECT_THROW(d->forward(torch::zeros({1, 1, 64, 64})), ShapeError);
  EXPECT_THROW(d->forward(torch::zeros({3, 64, 64})), ShapeError);
}

TEST(Critic, FullWidthLayerShapes) {
  Critic d(CriticConfig{});
  const auto& layers = d->layers();
  ASSERT_EQ(layers.size(), 5u);
  EXPECT_EQ(layers[0]->weight.sizes(), (std::vector<int64_t>{64, 3, 4, 4}));
  EXPECT_EQ(layers[3]->weight.sizes(), (std::vector<int64_t>{512, 256, 4, 4}));
  EXPECT_EQ(layers[4]->weight.sizes(), (std::vector<int64_t>{1, 512, 4, 4}));
}

TEST(Critic, EvalModeKeepsPowerIterationVectors) {
  Critic d(toy());
  d->init_parameters(3);
  d->eval();
  const auto u0 = d->layers()[1]->u.clone();
  d->forward(torch::randn({1, 3, 64, 64}));
  EXPECT_TRUE(torch::equal(u0, d->layers()[1]->u));
  d->train();
  d->forward(torch::randn({1, 3, 64, 64}));
  EXPECT_FALSE(torch::equal(u0, d->layers()[1]->u));
}

TEST(Critic, SpectralNormBoundsLipschitzConstant) {
  // A conv with unit-sigma kernel matrix has l2 gain at most k/s (each input
  // pixel feeds (k/s)^2 windows) and LeakyReLU is 1-Lipschitz, so the whole
  // critic is bounded by 2 * 2 * 2 * 4 * 4 = 128. Without normalization and
  // with large weights the same architecture exceeds that bound.
  constexpr double kBound = 128.0;
  Critic d(toy());
  d->init_parameters(4);
  {
    torch::NoGradGuard ng;
    for (auto& p : d->parameters()) p.mul_(50.0);
  }
  for (int i = 0; i < 30; ++i) d->forward(torch::randn({1, 3, 64, 64}));
  d->eval();

  CriticConfig plain = toy();
  plain.spectral_norm = false;
  Critic raw(plain);
  raw->init_parameters(4);
  {
    torch::NoGradGuard ng;
    for (auto& p : raw->parameters()) p.mul_(50.0);
  }
  for (auto layer : raw->layers()) EXPECT_TRUE(torch::equal(layer->effective_weight(), layer->weight));

  torch::NoGradGuard ng;
  double raw_max_ratio = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = torch::randn({1, 3, 64, 64});
    const auto y = x + 0.1 * torch::randn({1, 3, 64, 64});
    const double in = (x - y).norm().item<double>();
    EXPECT_LE((d->forward(x) - d->forward(y)).norm().item<double>(), kBound * in);
    raw_max_ratio = std::max(raw_max_ratio, (raw->forward(x) - raw->forward(y)).norm().item<double>() / in);
  }
  EXPECT_GT(raw_max_ratio, kBound);
}

TEST(SpectralNorm, ConvergesToSvd) {
  torch::manual_seed(0);
  const auto w = torch::randn({32, 16, 4, 4});
  auto gen = at::detail::getDefaultCPUGenerator();
  auto state = make_power_iteration_state(w, gen);
  const auto normalized = spectral_normalize(w, state, 100);
  EXPECT_NEAR(oracle::top_singular_value(normalized), 1.0, 1e-3);
  EXPECT_NEAR(spectral_sigma(w, state).item<double>(), oracle::top_singular_value(w),
              1e-3 * oracle::top_singular_value(w));
}

TEST(SpectralNorm, DiagonalMatrix) {
  const auto w = torch::tensor({{3.0, 0.0}, {0.0, 1.0}}, torch::kDouble);
  auto gen = at::make_generator<at::CPUGeneratorImpl>(3);
  auto state = make_power_iteration_state(w, gen);
  const auto n = spectral_normalize(w, state, 50);
  EXPECT_NEAR(n[0][0].item<double>(), 1.0, 1e-9);
  EXPECT_NEAR(n[1][1].item<double>(), 1.0 / 3.0, 1e-9);
  EXPECT_EQ(n[0][1].item<double>(), 0.0);
}

TEST(SpectralNorm, RandomMatrixAfterTwentyIterations) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(64128);
  const auto w = torch::randn({64, 128}, gen, torch::kDouble);
  auto state = make_power_iteration_state(w, gen);
  const auto n = spectral_normalize(w, state, 20);
  EXPECT_NEAR(oracle::top_singular_value(n), 1.0, 1e-2);
}

TEST(SpectralNorm, ZeroWeightUnchanged) {
  const auto w = torch::zeros({4, 2, 3, 3});
  auto gen = at::detail::getDefaultCPUGenerator();
  auto state = make_power_iteration_state(w, gen);
  const auto out = spectral_normalize(w, state, 3);
  EXPECT_TRUE(torch::isfinite(out).all().item<bool>());
  EXPECT_TRUE(torch::equal(out, w));
}

TEST(SpectralNorm, GradientFlowsToWeight) {
  auto w = torch::randn({8, 4, 3, 3}, torch::requires_grad());
  auto gen = at::detail::getDefaultCPUGenerator();
  auto state = make_power_iteration_state(w, gen);
  spectral_normalize(w, state, 1).sum().backward();
  ASSERT_TRUE(w.grad().defined());
  EXPECT_GT(w.grad().abs().sum().item<double>(), 0.0);
}
