#include "cli.hpp"

#include <cstdlib>
#include <iomanip>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scgan/config.hpp"
#include "scgan/dataset.hpp"
#include "scgan/error.hpp"
#include "scgan/hue_analysis.hpp"
#include "scgan/image_io.hpp"
#include "scgan/inference.hpp"
#include "scgan/log.hpp"
#include "scgan/metrics.hpp"
#include "scgan/training.hpp"

namespace scgan::cli {

namespace fs = std::filesystem;

namespace {

// Config layering: built-in defaults (or the toy preset), then the config
// file, then SCGAN_SEED, then --set assignments, then dedicated flags.
struct ConfigArgs {
  std::string file;
  bool toy = false;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string color_dir;
  std::string saliency_dir;

  void add_to(CLI::App& app) {
    app.add_option("config", file, "JSON config file")->check(CLI::ExistingFile);
    app.add_flag("--toy", toy, "start from the desk-scale preset instead of the full-scale defaults");
    app.add_option("--set", sets, "override a config key, e.g. --set train.batch_size=4")->take_all();
    app.add_option("--seed", seed, "training seed (overrides SCGAN_SEED and the config)");
  }
};

std::uint64_t parse_seed(const std::string& text, const std::string& source) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used, 10);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(source + ": '" + text + "' is not an unsigned integer seed");
  }
}

RunConfig resolve_config(const ConfigArgs& a) {
  nlohmann::json j = to_json(a.toy ? toy_run_config() : RunConfig{});
  if (!a.file.empty()) {
    std::ifstream in(a.file);
    if (!in) throw IoError("cannot open config " + a.file);
    nlohmann::json file;
    try {
      file = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config " + a.file + " is not valid JSON: " + e.what());
    }
    if (!file.is_object()) throw ConfigError("config " + a.file + " must be a JSON object");
    j.merge_patch(file);
  }
  if (const char* env = std::getenv("SCGAN_SEED"); env && *env) {
    j["train"]["seed"] = parse_seed(env, "SCGAN_SEED");
  }
  for (const auto& s : a.sets) apply_override(j, s);
  if (a.seed) j["train"]["seed"] = *a.seed;
  if (!a.out.empty()) j["output_dir"] = a.out;
  if (!a.color_dir.empty()) j["data"]["color_dir"] = a.color_dir;
  if (!a.saliency_dir.empty()) j["data"]["saliency_dir"] = a.saliency_dir;
  auto config = run_config_from_json(j);
  config.validate();
  return config;
}

void print_checkpoint(std::ostream& out, const CheckpointInfo& info) {
  out << "stage " << info.stage << " checkpoint: " << info.dir.string() << " (epoch " << info.epoch << ", step "
      << info.step << ", config " << info.config_hash << ")\n";
}

bool has_checkpoint(const fs::path& dir) { return fs::exists(dir / "manifest.json"); }

struct TrainArgs {
  ConfigArgs config;
  std::string stage = "all";
  std::string resume;
  bool from_scratch = false;
  std::optional<int> stop_after_epoch;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const auto config = resolve_config(a.config);
  if (config.data.color_dir.empty() || config.data.saliency_dir.empty()) {
    throw ConfigError("data.color_dir and data.saliency_dir must be set (config, --set or --color-dir/--saliency-dir)");
  }
  const auto index = build_index(config.data.color_dir, config.data.saliency_dir, config.data.split);
  if (index.entries.empty()) throw IoError("dataset " + config.data.color_dir + " has no usable images");
  const IndexSource data(index, config.generator.input_size);
  out << "dataset: " << index.entries.size() << " pairs (" << index.excluded_gray.size()
      << " grayscale files excluded)\n";

  Trainer trainer(config);
  out << "config hash " << trainer.hash() << "\n";
  const bool run1 = a.stage == "1" || a.stage == "all";
  const bool run2 = a.stage == "2" || a.stage == "all";

  if (!a.resume.empty()) {
    trainer.restore(a.resume);
    out << "resumed from " << a.resume << " (stage " << trainer.stage() << ", epoch " << trainer.epoch() << ")\n";
    if (trainer.stage() == 2 && !run2) throw Error("cannot resume a stage-2 checkpoint with --stage 1");
  } else if (a.stage == "2") {
    const auto stage1 = trainer.stage_dir(1);
    if (has_checkpoint(stage1)) {
      trainer.start_stage2_from(stage1);
      out << "stage 2 starts from " << stage1.string() << "\n";
    } else if (a.from_scratch) {
      trainer.begin_stage2();
      out << "stage 2 starts from scratch\n";
    } else {
      throw Error("stage 2 needs a stage-1 checkpoint in " + stage1.string() +
                  " (or --resume <dir>, or --from-scratch)");
    }
  }

  if (trainer.stage() == 1 && run1) {
    const auto info = trainer.train_stage1(data, a.stop_after_epoch);
    print_checkpoint(out, info);
    if (a.stop_after_epoch && info.epoch < config.train.stage1_epochs) return kOk;
  }
  if (!run2) return kOk;
  if (trainer.stage() == 1) trainer.begin_stage2();
  print_checkpoint(out, trainer.train_stage2(data, a.stop_after_epoch));
  return kOk;
}

struct ColorizeArgs {
  std::string checkpoint;
  std::string input;
  std::string output;
  bool save_saliency = false;
  bool save_weighted = false;
};

int cmd_colorize(const ColorizeArgs& a, std::ostream& out) {
  auto loaded = load_generator_checkpoint(a.checkpoint);
  std::vector<fs::path> inputs;
  if (fs::is_directory(a.input)) {
    for (const auto& [stem, path] : images_by_stem(a.input)) inputs.push_back(path);
    if (inputs.empty()) throw IoError("no images in " + a.input);
  } else {
    inputs.push_back(a.input);
  }
  const fs::path out_dir(a.output);
  for (const auto& path : inputs) {
    const auto result = colorize(loaded.generator, read_image(path));
    if (result.resized) {
      log::warn(path.string() + ": size is not a multiple of the network stride; resized for inference and back");
    }
    const auto stem = path.stem().string();
    write_image(out_dir / (stem + ".png"), result.color);
    if (a.save_saliency) write_image(out_dir / "saliency" / (stem + ".png"), result.saliency);
    if (a.save_weighted) write_image(out_dir / "weighted" / (stem + ".png"), result.weighted);
    out << path.string() << " -> " << (out_dir / (stem + ".png")).string() << "\n";
  }
  return kOk;
}

int cmd_evaluate(const std::string& pred, const std::string& gt, const std::string& prefix, std::ostream& out) {
  const auto report = evaluate_pairs(pred, gt);
  write_report(report, prefix);
  out << "images: " << report.rows.size() << "\n"
      << std::setprecision(6) << "mean PSNR (dB): " << report.mean_psnr << "\n"
      << "mean SSIM: " << report.mean_ssim << "\n"
      << "mean CCI: " << report.mean_cci << "\n"
      << "CCI ratio: " << report.cci_ratio.numerator << "/" << report.cci_ratio.denominator << "\n"
      << "report: " << prefix << ".csv, " << prefix << ".json\n";
  return kOk;
}

int cmd_analyze_hue(const std::string& images, const std::string& saliency, const std::string& prefix,
                    const HueAnalysisOptions& options, std::ostream& out) {
  const auto analysis = analyze_hue_dirs(images, saliency, options);
  write_hue_report(analysis, options, prefix);
  for (auto c : {PatchClass::Salient, PatchClass::Unsalient, PatchClass::Random}) {
    const auto& h = analysis.at(c);
    out << to_string(c) << ": " << h.patches << " patches, " << h.chromatic_pixels << " chromatic pixels";
    if (h.chromatic_pixels > 0) out << ", green-blue fraction " << std::setprecision(6) << h.green_blue_fraction();
    out << "\n";
  }
  out << "report: " << prefix << ".csv, " << prefix << ".json\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Saliency-guided image colorization", "scgan"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand help for all subcommands");
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "only log warnings and errors");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "run training stage 1, stage 2 or both");
  train.config.add_to(*train_cmd);
  train_cmd->add_option("--stage", train.stage, "stage to run")->check(CLI::IsMember({"1", "2", "all"}));
  train_cmd->add_option("--resume", train.resume, "checkpoint directory to resume from");
  train_cmd->add_flag("--from-scratch", train.from_scratch, "allow stage 2 without a stage-1 checkpoint");
  train_cmd->add_option("--out", train.config.out, "output directory (overrides output_dir)");
  train_cmd->add_option("--color-dir", train.config.color_dir, "colour image directory");
  train_cmd->add_option("--saliency-dir", train.config.saliency_dir, "saliency map directory");
  train_cmd->add_option("--stop-after-epoch", train.stop_after_epoch,
                        "checkpoint and exit once this many epochs of the current stage are done")
      ->check(CLI::PositiveNumber);

  ColorizeArgs colorize_args;
  auto* colorize_cmd = app.add_subcommand("colorize", "colorize grayscale images with a trained generator");
  colorize_cmd->add_option("--checkpoint", colorize_args.checkpoint, "checkpoint directory")->required();
  colorize_cmd->add_option("--input", colorize_args.input, "image file or directory")->required()->check(
      CLI::ExistingPath);
  colorize_cmd->add_option("--output", colorize_args.output, "output directory")->required();
  colorize_cmd->add_flag("--save-saliency", colorize_args.save_saliency, "also write saliency/<name>.png");
  colorize_cmd->add_flag("--save-weighted", colorize_args.save_weighted, "also write weighted/<name>.png");

  std::string pred, gt, eval_out;
  auto* eval_cmd = app.add_subcommand("evaluate", "PSNR, SSIM and CCI of predictions against ground truth");
  eval_cmd->add_option("--pred", pred, "predicted images")->required();
  eval_cmd->add_option("--gt", gt, "ground-truth images")->required();
  eval_cmd->add_option("--out", eval_out, "report prefix (writes <prefix>.csv and <prefix>.json)")->required();

  std::string hue_images, hue_saliency, hue_out;
  HueAnalysisOptions hue;
  auto* hue_cmd = app.add_subcommand("analyze-hue", "hue histograms of salient, unsalient and random patches");
  hue_cmd->add_option("--images", hue_images, "colour images")->required();
  hue_cmd->add_option("--saliency", hue_saliency, "saliency maps")->required();
  hue_cmd->add_option("--out", hue_out, "report prefix")->required();
  hue_cmd->add_option("--patch", hue.patch, "patch size in pixels")->check(CLI::PositiveNumber);
  hue_cmd->add_option("--high-threshold", hue.high_threshold, "saliency level counted as high")
      ->check(CLI::Range(0.0, 1.0));
  hue_cmd->add_option("--coverage", hue.coverage, "share of high pixels in a salient patch")
      ->check(CLI::Range(0.0, 1.0));
  hue_cmd->add_option("--random-patches", hue.random_patches, "random patches per image (0: one per tile)")
      ->check(CLI::NonNegativeNumber);
  hue_cmd->add_option("--seed", hue.seed, "seed for random patch positions");

  int toy_n = 8, toy_size = 64;
  std::uint64_t toy_seed = 0;
  std::string toy_out;
  auto* toy_cmd = app.add_subcommand("make-toy-data", "write a synthetic shapes dataset");
  toy_cmd->add_option("--n", toy_n, "number of images")->check(CLI::PositiveNumber);
  toy_cmd->add_option("--size", toy_size, "image size (multiple of 32)");
  toy_cmd->add_option("--seed", toy_seed, "generator seed");
  toy_cmd->add_option("--out", toy_out, "output directory (color/ and saliency/ are created)")->required();

  ConfigArgs print_args;
  auto* print_cmd = app.add_subcommand("print-config", "print the resolved configuration as JSON");
  print_args.add_to(*print_cmd);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  log::set_level(quiet ? log::Level::Warn : log::Level::Info);

  try {
    if (*train_cmd) return cmd_train(train, out);
    if (*colorize_cmd) return cmd_colorize(colorize_args, out);
    if (*eval_cmd) return cmd_evaluate(pred, gt, eval_out, out);
    if (*hue_cmd) return cmd_analyze_hue(hue_images, hue_saliency, hue_out, hue, out);
    if (*toy_cmd) {
      const auto samples = make_toy_images(toy_n, toy_size, toy_seed);
      write_toy_dataset(samples, toy_out);
      out << "wrote " << samples.size() << " samples to " << toy_out << "\n";
      return kOk;
    }
    if (*print_cmd) {
      out << to_json(resolve_config(print_args)).dump(2) << "\n";
      return kOk;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const TrainingAborted& e) {
    err << "training aborted: " << e.what() << "\n";
    return kAborted;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace scgan::cli
