#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "scgan/critic.hpp"
#include "scgan/generator.hpp"
#include "scgan/losses.hpp"
#include "scgan/train_config.hpp"

namespace scgan {

struct DataConfig {
  std::string color_dir;
  std::string saliency_dir;
  std::string split = "train";
  /// Only "bilinear" is implemented; kept in the snapshot for reproducibility.
  std::string resize = "bilinear";
};

/// Everything a run needs. Defaults are the full-scale settings; the
/// generator's global-encoder flag is driven by train.ablation.use_global.
struct RunConfig {
  GeneratorConfig generator;
  CriticConfig critic;
  TrainConfig train;
  LossWeights loss;
  PerceptualConfig perceptual;
  DataConfig data;
  std::string output_dir = "runs/scgan";

  /// Generator config with ablation switches applied.
  [[nodiscard]] GeneratorConfig effective_generator() const;
  void validate() const;
};

nlohmann::json to_json(const RunConfig& config);

/// Missing keys keep their defaults; unknown keys throw ConfigError naming
/// the dotted key path.
RunConfig run_config_from_json(const nlohmann::json& j);

RunConfig load_run_config(const std::filesystem::path& path);

/// Applies "dotted.key=value" to a JSON config tree. The value is parsed as
/// JSON when possible, otherwise taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Hex digest of the settings that affect training numerics (data paths,
/// output directory and checkpoint cadence excluded).
std::string config_hash(const RunConfig& config);

/// Desk-scale preset: 64-pixel inputs, quarter-width networks.
RunConfig toy_run_config();

}  // namespace scgan
