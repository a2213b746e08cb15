#include <random>

#include <benchmark/benchmark.h>

#include "scgan/config.hpp"
#include "scgan/critic.hpp"
#include "scgan/generator.hpp"
#include "scgan/losses.hpp"
#include "scgan/metrics.hpp"

namespace {

scgan::Image8 noise_image(int side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  scgan::Image8 img(side, side, 3);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(dist(rng));
  return img;
}

void BM_Cci(benchmark::State& state) {
  const auto img = noise_image(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(scgan::cci(img).cci);
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_Cci)->Arg(64)->Arg(256);

void BM_Ssim(benchmark::State& state) {
  const auto a = noise_image(static_cast<int>(state.range(0)), 2);
  const auto b = noise_image(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(scgan::ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(256);

void BM_Psnr(benchmark::State& state) {
  const auto a = noise_image(256, 4);
  const auto b = noise_image(256, 5);
  for (auto _ : state) benchmark::DoNotOptimize(scgan::psnr(a, b));
}
BENCHMARK(BM_Psnr);

void BM_GeneratorForward(benchmark::State& state) {
  auto cfg = scgan::toy_run_config().generator;
  cfg.input_size = static_cast<int>(state.range(0));
  scgan::Generator g(cfg);
  g->init_parameters(0);
  g->eval();
  torch::NoGradGuard ng;
  const auto x = torch::rand({1, 1, cfg.input_size, cfg.input_size}) * 2 - 1;
  for (auto _ : state) benchmark::DoNotOptimize(g->forward(x).color);
}
BENCHMARK(BM_GeneratorForward)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_CriticForward(benchmark::State& state) {
  scgan::Critic d(scgan::toy_run_config().critic);
  d->init_parameters(0);
  d->train();
  torch::NoGradGuard ng;
  const auto x = torch::rand({4, 3, 64, 64}) * 2 - 1;
  for (auto _ : state) benchmark::DoNotOptimize(d->forward(x));
}
BENCHMARK(BM_CriticForward)->Unit(benchmark::kMillisecond);

void BM_GradientPenalty(benchmark::State& state) {
  scgan::Critic d(scgan::toy_run_config().critic);
  d->init_parameters(0);
  auto gen = at::detail::getDefaultCPUGenerator();
  const auto real = torch::rand({4, 3, 64, 64}) * 2 - 1;
  const auto fake = torch::rand({4, 3, 64, 64}) * 2 - 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        scgan::gradient_penalty([&](const torch::Tensor& x) { return d->forward(x); }, real, fake, 10.0, gen));
  }
}
BENCHMARK(BM_GradientPenalty)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
