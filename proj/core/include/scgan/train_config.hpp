#pragma once

#include <cstdint>
#include <string>

#include "scgan/losses.hpp"

namespace scgan {

/// Switches for the seven ablation settings.
struct AblationSwitches {
  bool use_attention = true;      // 1: attention loss and attention critic
  bool use_gan = true;            // 2: both critics and adversarial terms
  bool use_perceptual = true;     // 3: perceptual term in stage 2
  AdvMode adv_mode = AdvMode::WGAN;  // 4: WGAN-GP or LSGAN
  bool pretrained_global = true;  // 5: false forces Gaussian init of the global encoder
  bool use_global = true;         // 6: global encoder present
  PixelMode pixel_mode = PixelMode::L1;  // 7: L1 or L2 pixel loss
};

struct TrainConfig {
  int stage1_epochs = 10;
  int stage2_epochs = 30;
  double lr_stage1 = 2e-4;
  double lr_stage2_initial = 1e-4;
  int lr_halving_period = 10;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  int batch_size = 8;
  double input_noise_std = 0.005;
  std::uint64_t seed = 0;
  int critic_steps_per_gen_step = 1;
  /// Epoch interval between checkpoint writes (the final epoch always writes).
  int checkpoint_every = 1;
  /// Optional weight manifest for the global encoder.
  std::string global_weights;
  AblationSwitches ablation;

  void validate() const;
};

struct PerceptualConfig {
  std::string layer = "conv3_3";
  double width_multiplier = 1.0;
  std::uint64_t seed = 0;
  /// Optional weight manifest; empty selects the fixed-seed random extractor.
  std::string weights;
};

/// Stage 1: constant lr_stage1. Stage 2: lr_stage2_initial halved every
/// lr_halving_period epochs. Throws ConfigError for other stages or a
/// negative epoch.
double lr_schedule(int stage, int epoch_in_stage, const TrainConfig& config = {});

}  // namespace scgan
