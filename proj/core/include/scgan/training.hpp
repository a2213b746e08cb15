#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "scgan/config.hpp"
#include "scgan/critic.hpp"
#include "scgan/dataset.hpp"
#include "scgan/error.hpp"
#include "scgan/generator.hpp"
#include "scgan/losses.hpp"
#include "scgan/perceptual.hpp"

namespace scgan {

/// One logged optimization step (one generator update).
struct LossRecord {
  std::int64_t step = 0;
  LossBreakdown loss;
  double lr = 0.0;
};

struct CheckpointInfo {
  std::filesystem::path dir;
  int stage = 1;
  int epoch = 0;  // completed epochs within the stage
  std::int64_t step = 0;
  std::string config_hash;
};

/// A non-finite loss stopped training; the state before the offending update
/// was written to `diagnostic_dir`.
class TrainingAborted : public Error {
 public:
  TrainingAborted(const std::string& what, std::filesystem::path diagnostic_dir)
      : Error(what), diagnostic_dir_(std::move(diagnostic_dir)) {}
  [[nodiscard]] const std::filesystem::path& diagnostic_dir() const { return diagnostic_dir_; }

 private:
  std::filesystem::path diagnostic_dir_;
};

/// x + N(0, std^2) elementwise, drawn from `gen`. std = 0 returns x unchanged.
torch::Tensor add_input_noise(const torch::Tensor& x, double stddev, torch::Generator& gen);

/// Batch order for one epoch; a pure function of (seed, stage, epoch).
std::vector<std::vector<std::int64_t>> epoch_batches(std::size_t dataset_size, int batch_size, std::uint64_t seed,
                                                     int stage, int epoch);

/// Checkpoint layout inside a stage directory:
///   manifest.json                 stage, epoch, step, config hash, RNG state, config snapshot
///   losses.csv                    step,l1,attention,adv_g,perceptual,total,adv_d,gp_c,gp_a,lr
///   generator.json/.bin           weight manifest (parameters and buffers)
///   critic_color.json/.bin        stage 2 only
///   critic_attention.json/.bin    stage 2 with attention enabled
///   optimizer_*.pt                optimizer state
///
/// Single-threaded owner of the model state. Stage 1 optimizes the generator
/// on pixel + attention loss; stage 2 alternates critic and generator updates.
class Trainer {
 public:
  explicit Trainer(RunConfig config);

  /// Runs stage-1 epochs from the current position. `stop_after_epoch`
  /// interrupts early (checkpoint written) without changing the config.
  CheckpointInfo train_stage1(const SampleSource& data, std::optional<int> stop_after_epoch = {});

  /// Switches the in-memory state to stage 2 (fresh generator optimizer,
  /// epoch counter reset, history cleared).
  void begin_stage2();
  /// Loads generator weights and counters from a stage-1 checkpoint, then begin_stage2().
  void start_stage2_from(const std::filesystem::path& stage1_checkpoint);
  CheckpointInfo train_stage2(const SampleSource& data, std::optional<int> stop_after_epoch = {});

  /// Restores the exact state saved in a checkpoint directory. Refuses a
  /// checkpoint whose config hash differs from this trainer's.
  void restore(const std::filesystem::path& checkpoint_dir);
  CheckpointInfo save_checkpoint(const std::filesystem::path& dir) const;

  [[nodiscard]] const std::vector<LossRecord>& history() const { return history_; }
  [[nodiscard]] int stage() const { return stage_; }
  [[nodiscard]] int epoch() const { return epoch_; }
  [[nodiscard]] std::int64_t step() const { return step_; }
  [[nodiscard]] const RunConfig& config() const { return config_; }
  [[nodiscard]] const std::string& hash() const { return hash_; }
  [[nodiscard]] std::filesystem::path stage_dir(int stage) const;

  Generator& generator() { return generator_; }
  Critic& color_critic() { return color_critic_; }
  Critic& attention_critic() { return attention_critic_; }

 private:
  LossBreakdown stage1_step(const Batch& batch);
  LossBreakdown stage2_step(const Batch& batch);
  void set_learning_rate(double lr);
  void make_optimizers();
  void check_finite(const LossBreakdown& loss);
  CheckpointInfo run_stage(int stage, const SampleSource& data, std::optional<int> stop_after_epoch);

  RunConfig config_;
  std::string hash_;
  Generator generator_{nullptr};
  Critic color_critic_{nullptr};
  Critic attention_critic_{nullptr};
  std::unique_ptr<VggFeatureExtractor> extractor_;
  std::unique_ptr<torch::optim::Adam> opt_generator_;
  std::unique_ptr<torch::optim::Adam> opt_color_;
  std::unique_ptr<torch::optim::Adam> opt_attention_;
  torch::Generator rng_;

  int stage_ = 1;
  int epoch_ = 0;
  std::int64_t step_ = 0;
  std::vector<LossRecord> history_;
};

/// Parses a losses.csv written by the trainer.
std::vector<LossRecord> read_loss_log(const std::filesystem::path& csv);
void write_loss_log(const std::filesystem::path& csv, const std::vector<LossRecord>& records);

}  // namespace scgan
