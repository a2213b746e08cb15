#include "scgan/training.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scgan/log.hpp"
#include "scgan/tensor_bridge.hpp"
#include "scgan/weights.hpp"

namespace scgan {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCheckpointFormat = "scgan-checkpoint/1";

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string to_hex(const torch::Tensor& bytes) {
  const auto t = bytes.contiguous();
  const auto* p = t.data_ptr<std::uint8_t>();
  std::string out;
  out.reserve(static_cast<std::size_t>(t.numel()) * 2);
  char buf[3];
  for (std::int64_t i = 0; i < t.numel(); ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", p[i]);
    out += buf;
  }
  return out;
}

torch::Tensor from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw IoError("checkpoint: malformed RNG state");
  auto t = torch::empty({static_cast<std::int64_t>(hex.size() / 2)}, torch::kUInt8);
  auto* p = t.data_ptr<std::uint8_t>();
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    p[i / 2] = static_cast<std::uint8_t>(std::stoul(hex.substr(i, 2), nullptr, 16));
  }
  return t;
}

torch::optim::Adam make_adam(std::vector<torch::Tensor> params, const TrainConfig& t, double lr) {
  return torch::optim::Adam(std::move(params),
                            torch::optim::AdamOptions(lr).betas({t.adam_beta1, t.adam_beta2}));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

torch::Tensor add_input_noise(const torch::Tensor& x, double stddev, torch::Generator& gen) {
  if (stddev < 0) throw ConfigError("input noise std must be >= 0");
  if (stddev == 0.0) return x;
  return x + torch::randn(x.sizes(), gen, x.options()) * stddev;
}

std::vector<std::vector<std::int64_t>> epoch_batches(std::size_t dataset_size, int batch_size, std::uint64_t seed,
                                                     int stage, int epoch) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(
      splitmix64(seed ^ splitmix64((static_cast<std::uint64_t>(stage) << 32) | static_cast<std::uint32_t>(epoch))));
  const auto perm = torch::randperm(static_cast<std::int64_t>(dataset_size), gen, torch::kInt64);
  const auto* p = perm.data_ptr<std::int64_t>();
  std::vector<std::vector<std::int64_t>> batches;
  for (std::size_t start = 0; start < dataset_size; start += batch_size) {
    const std::size_t end = std::min(dataset_size, start + static_cast<std::size_t>(batch_size));
    batches.emplace_back(p + start, p + end);
  }
  return batches;
}

void write_loss_log(const fs::path& csv, const std::vector<LossRecord>& records) {
  std::ofstream out(csv, std::ios::trunc);
  if (!out) throw IoError("cannot write " + csv.string());
  out << "step,l1,attention,adv_g,perceptual,total,adv_d,gp_c,gp_a,lr\n";
  for (const auto& r : records) {
    const auto& l = r.loss;
    out << r.step;
    for (double v : {l.l1, l.attention, l.adv_g, l.perceptual, l.total, l.adv_d, l.gp_c, l.gp_a, r.lr}) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
}

std::vector<LossRecord> read_loss_log(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw IoError("cannot open " + csv.string());
  std::string line;
  std::getline(in, line);
  std::vector<LossRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 10) throw IoError("malformed row in " + csv.string() + ": " + line);
    LossRecord r;
    r.step = std::stoll(cells[0]);
    double* fields[] = {&r.loss.l1,    &r.loss.attention, &r.loss.adv_g, &r.loss.perceptual, &r.loss.total,
                        &r.loss.adv_d, &r.loss.gp_c,      &r.loss.gp_a,  &r.lr};
    for (std::size_t i = 0; i < 9; ++i) *fields[i] = std::stod(cells[i + 1]);
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------

Trainer::Trainer(RunConfig config)
    : config_(std::move(config)),
      hash_(config_hash(config_)),
      rng_(at::make_generator<at::CPUGeneratorImpl>(config_.train.seed)) {
  config_.validate();
  const auto& t = config_.train;
  const auto& ab = t.ablation;

  generator_ = Generator(config_.effective_generator());
  const auto global_init = ab.pretrained_global ? GlobalInit::Seeded : GlobalInit::Gaussian;
  generator_->init_parameters(t.seed, global_init);
  if (ab.use_global && ab.pretrained_global) {
    if (!t.global_weights.empty()) {
      generator_->load_global_encoder_weights(t.global_weights);
    } else {
      log::warn("no global-encoder weight manifest given; using seeded initialization");
    }
  }

  if (ab.use_gan) {
    color_critic_ = Critic(config_.critic);
    color_critic_->init_parameters(splitmix64(t.seed + 1));
    if (ab.use_attention) {
      attention_critic_ = Critic(config_.critic);
      attention_critic_->init_parameters(splitmix64(t.seed + 2));
    }
  }
  if (ab.use_perceptual) {
    VggExtractorConfig vc;
    vc.width_multiplier = config_.perceptual.width_multiplier;
    vc.seed = config_.perceptual.seed;
    vc.weights = config_.perceptual.weights;
    extractor_ = std::make_unique<VggFeatureExtractor>(vc);
    const auto names = extractor_->layer_names();
    if (std::find(names.begin(), names.end(), config_.perceptual.layer) == names.end()) {
      throw ConfigError("perceptual.layer '" + config_.perceptual.layer + "' is not an extractor layer");
    }
  }
  make_optimizers();
}

fs::path Trainer::stage_dir(int stage) const {
  return fs::path(config_.output_dir) / ("stage" + std::to_string(stage));
}

void Trainer::make_optimizers() {
  const auto& t = config_.train;
  const double lr = lr_schedule(stage_, epoch_, t);
  opt_generator_ = std::make_unique<torch::optim::Adam>(make_adam(generator_->parameters(), t, lr));
  opt_color_.reset();
  opt_attention_.reset();
  if (stage_ == 2) {
    if (color_critic_) opt_color_ = std::make_unique<torch::optim::Adam>(make_adam(color_critic_->parameters(), t, lr));
    if (attention_critic_) {
      opt_attention_ = std::make_unique<torch::optim::Adam>(make_adam(attention_critic_->parameters(), t, lr));
    }
  }
}

void Trainer::set_learning_rate(double lr) {
  for (auto* opt : {opt_generator_.get(), opt_color_.get(), opt_attention_.get()}) {
    if (!opt) continue;
    for (auto& group : opt->param_groups()) static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr);
  }
}

void Trainer::check_finite(const LossBreakdown& loss) {
  if (loss.all_finite()) return;
  const auto dir = fs::path(config_.output_dir) / "diagnostic";
  save_checkpoint(dir);
  throw TrainingAborted("non-finite loss at step " + std::to_string(step_ + 1) + " (stage " +
                            std::to_string(stage_) + "); diagnostic checkpoint in " + dir.string(),
                        dir);
}

LossBreakdown Trainer::stage1_step(const Batch& batch) {
  const auto& ab = config_.train.ablation;
  generator_->train();
  const auto x = add_input_noise(batch.x, config_.train.input_noise_std, rng_);
  const auto out = generator_->forward(x);

  GeneratorLossTerms terms;
  terms.pixel = pixel_loss(out.color, batch.c, ab.pixel_mode);
  if (ab.use_attention) terms.attention = attention_loss(out.color, out.saliency, batch.c, batch.s);
  auto loss = total_generator_loss(terms, config_.loss, 1);
  check_finite(loss.breakdown);

  opt_generator_->zero_grad();
  loss.total.backward();
  opt_generator_->step();
  return loss.breakdown;
}

LossBreakdown Trainer::stage2_step(const Batch& batch) {
  const auto& ab = config_.train.ablation;
  const auto& w = config_.loss;
  generator_->train();
  const auto x = add_input_noise(batch.x, config_.train.input_noise_std, rng_);
  const auto out = generator_->forward(x);
  const auto fake_color = out.color;
  const auto fake_weighted = weight_by_saliency(out.color, out.saliency);
  const auto real_color = batch.c;
  const auto real_weighted = weight_by_saliency(batch.c, batch.s);

  LossBreakdown critic_side;
  if (ab.use_gan) {
    color_critic_->train();
    if (attention_critic_) attention_critic_->train();
    for (int k = 0; k < config_.train.critic_steps_per_gen_step; ++k) {
      CriticScores scores;
      scores.dc_fake = color_critic_->forward(fake_color.detach());
      scores.dc_real = color_critic_->forward(real_color);
      torch::Tensor gp_c, gp_a;
      const bool wgan = ab.adv_mode == AdvMode::WGAN;
      if (wgan) {
        gp_c = gradient_penalty([this](const torch::Tensor& t) { return color_critic_->forward(t); }, real_color,
                                fake_color, w.gp_lambda, rng_);
      }
      if (attention_critic_) {
        scores.da_fake = attention_critic_->forward(fake_weighted.detach());
        scores.da_real = attention_critic_->forward(real_weighted);
        if (wgan) {
          gp_a = gradient_penalty([this](const torch::Tensor& t) { return attention_critic_->forward(t); },
                                  real_weighted, fake_weighted, w.gp_lambda, rng_);
        }
      }
      const auto d_loss = critic_loss(scores, gp_c, gp_a, ab.adv_mode);
      critic_side.adv_d = d_loss.item<double>();
      critic_side.gp_c = gp_c.defined() ? gp_c.item<double>() : 0.0;
      critic_side.gp_a = gp_a.defined() ? gp_a.item<double>() : 0.0;
      check_finite(critic_side);

      opt_color_->zero_grad();
      if (opt_attention_) opt_attention_->zero_grad();
      d_loss.backward();
      opt_color_->step();
      if (opt_attention_) opt_attention_->step();
    }
  }

  GeneratorLossTerms terms;
  terms.pixel = pixel_loss(fake_color, real_color, ab.pixel_mode);
  if (ab.use_attention) terms.attention = attention_loss(out.color, out.saliency, batch.c, batch.s);
  if (ab.use_gan) {
    // Eval mode: the generator update reads the critics without advancing
    // their power-iteration vectors.
    color_critic_->eval();
    if (attention_critic_) attention_critic_->eval();
    const auto dc = color_critic_->forward(fake_color);
    const auto da = attention_critic_ ? attention_critic_->forward(fake_weighted) : torch::Tensor();
    terms.adversarial = generator_adv_loss(dc, da, ab.adv_mode);
  }
  if (extractor_) terms.perceptual = perceptual_loss(*extractor_, fake_color, real_color, config_.perceptual.layer);
  auto loss = total_generator_loss(terms, w, 2);
  loss.breakdown.adv_d = critic_side.adv_d;
  loss.breakdown.gp_c = critic_side.gp_c;
  loss.breakdown.gp_a = critic_side.gp_a;
  check_finite(loss.breakdown);

  opt_generator_->zero_grad();
  loss.total.backward();
  opt_generator_->step();
  if (opt_color_) opt_color_->zero_grad();
  if (opt_attention_) opt_attention_->zero_grad();
  return loss.breakdown;
}

CheckpointInfo Trainer::run_stage(int stage, const SampleSource& data, std::optional<int> stop_after_epoch) {
  if (stage_ != stage) {
    throw Error("trainer is in stage " + std::to_string(stage_) + ", cannot run stage " + std::to_string(stage));
  }
  if (data.size() == 0) throw Error("training dataset is empty");
  const auto& t = config_.train;
  const int total_epochs = stage == 1 ? t.stage1_epochs : t.stage2_epochs;
  const auto dir = stage_dir(stage);
  if (epoch_ >= total_epochs) return save_checkpoint(dir);

  while (epoch_ < total_epochs) {
    const double lr = lr_schedule(stage, epoch_, t);
    set_learning_rate(lr);
    for (const auto& indices : epoch_batches(data.size(), t.batch_size, t.seed, stage, epoch_)) {
      const Batch batch = collate(data, indices);
      LossRecord rec;
      rec.loss = stage == 1 ? stage1_step(batch) : stage2_step(batch);
      rec.step = ++step_;
      rec.lr = lr;
      history_.push_back(rec);
    }
    ++epoch_;
    const auto& last = history_.back().loss;
    log::info(log::format("stage %d epoch %d/%d step %lld: l1=%.5f att=%.5f adv_g=%.5f perc=%.5f total=%.5f", stage,
                          epoch_, total_epochs, static_cast<long long>(step_), last.l1, last.attention, last.adv_g,
                          last.perceptual, last.total));
    const bool stop = stop_after_epoch && epoch_ >= *stop_after_epoch;
    if (stop || epoch_ == total_epochs || epoch_ % t.checkpoint_every == 0) {
      auto info = save_checkpoint(dir);
      if (stop) return info;
    }
  }
  return {dir, stage_, epoch_, step_, hash_};
}

CheckpointInfo Trainer::train_stage1(const SampleSource& data, std::optional<int> stop_after_epoch) {
  return run_stage(1, data, stop_after_epoch);
}

CheckpointInfo Trainer::train_stage2(const SampleSource& data, std::optional<int> stop_after_epoch) {
  return run_stage(2, data, stop_after_epoch);
}

void Trainer::begin_stage2() {
  stage_ = 2;
  epoch_ = 0;
  history_.clear();
  make_optimizers();
}

void Trainer::start_stage2_from(const fs::path& stage1_checkpoint) {
  restore(stage1_checkpoint);
  if (stage_ != 1) throw Error("checkpoint " + stage1_checkpoint.string() + " is not a stage-1 checkpoint");
  if (epoch_ < config_.train.stage1_epochs) {
    log::warn(log::format("stage-1 checkpoint has %d of %d epochs", epoch_, config_.train.stage1_epochs));
  }
  begin_stage2();
}

CheckpointInfo Trainer::save_checkpoint(const fs::path& dir) const {
  fs::create_directories(dir);
  save_module(dir / "generator.json", *generator_);
  torch::save(*opt_generator_, (dir / "optimizer_generator.pt").string());
  if (stage_ == 2 && color_critic_) {
    save_module(dir / "critic_color.json", *color_critic_);
    torch::save(*opt_color_, (dir / "optimizer_critic_color.pt").string());
  }
  if (stage_ == 2 && attention_critic_) {
    save_module(dir / "critic_attention.json", *attention_critic_);
    torch::save(*opt_attention_, (dir / "optimizer_critic_attention.pt").string());
  }
  write_loss_log(dir / "losses.csv", history_);

  nlohmann::json m;
  m["format"] = kCheckpointFormat;
  m["stage"] = stage_;
  m["epoch"] = epoch_;
  m["step"] = step_;
  m["config_hash"] = hash_;
  m["rng_state"] = to_hex(rng_.get_state());
  m["config"] = to_json(config_);
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << m.dump(2) << '\n';
  return {dir, stage_, epoch_, step_, hash_};
}

void Trainer::restore(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("no checkpoint manifest in " + dir.string());
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("corrupt checkpoint manifest in " + dir.string() + ": " + e.what());
  }
  if (m.value("format", "") != kCheckpointFormat) throw IoError("not a checkpoint: " + dir.string());
  const auto saved_hash = m.at("config_hash").get<std::string>();
  if (saved_hash != hash_) {
    throw ConfigError("checkpoint config hash " + saved_hash + " does not match the current config hash " + hash_ +
                      " (" + dir.string() + ")");
  }
  stage_ = m.at("stage").get<int>();
  epoch_ = m.at("epoch").get<int>();
  step_ = m.at("step").get<std::int64_t>();

  load_module(dir / "generator.json", *generator_);
  if (stage_ == 2 && color_critic_) load_module(dir / "critic_color.json", *color_critic_);
  if (stage_ == 2 && attention_critic_) load_module(dir / "critic_attention.json", *attention_critic_);
  make_optimizers();
  torch::load(*opt_generator_, (dir / "optimizer_generator.pt").string());
  if (opt_color_) torch::load(*opt_color_, (dir / "optimizer_critic_color.pt").string());
  if (opt_attention_) torch::load(*opt_attention_, (dir / "optimizer_critic_attention.pt").string());
  rng_.set_state(from_hex(m.at("rng_state").get<std::string>()));
  history_ = read_loss_log(dir / "losses.csv");
}

}  // namespace scgan
