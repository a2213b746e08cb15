#include "scgan/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "scgan/error.hpp"

namespace scgan {

using nlohmann::json;

namespace {

// Reads the members of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config key '" + display() + "' must be an object");
  }

  template <class T>
  void field(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + path_ + key + "' has the wrong type: " + e.what());
    }
  }

  template <class Fn>
  void object(const char* key, Fn&& read) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    ObjectReader nested(j_.at(key), path_ + key + ".");
    read(nested);
    nested.finish();
  }

  template <class E>
  void enumeration(const char* key, E& out, std::initializer_list<std::pair<const char*, E>> names) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const auto& v = j_.at(key);
    if (v.is_string()) {
      for (const auto& [name, value] : names) {
        if (v.get<std::string>() == name) {
          out = value;
          return;
        }
      }
    }
    throw ConfigError("config key '" + path_ + key + "' has an invalid value " + v.dump());
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.contains(item.key())) throw ConfigError("unknown config key '" + path_ + item.key() + "'");
    }
  }

 private:
  [[nodiscard]] std::string display() const { return path_.empty() ? "<root>" : path_.substr(0, path_.size() - 1); }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* adv_name(AdvMode m) { return m == AdvMode::WGAN ? "wgan" : "lsgan"; }
const char* pixel_name(PixelMode m) { return m == PixelMode::L1 ? "l1" : "l2"; }

}  // namespace

void TrainConfig::validate() const {
  if (stage1_epochs < 0 || stage2_epochs < 0) throw ConfigError("train epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (lr_stage1 < 0 || lr_stage2_initial < 0) throw ConfigError("learning rates must be >= 0");
  if (lr_halving_period < 1) throw ConfigError("train.lr_halving_period must be >= 1");
  if (input_noise_std < 0) throw ConfigError("train.input_noise_std must be >= 0");
  if (critic_steps_per_gen_step < 1) throw ConfigError("train.critic_steps_per_gen_step must be >= 1");
  if (checkpoint_every < 1) throw ConfigError("train.checkpoint_every must be >= 1");
  if (!(adam_beta1 >= 0 && adam_beta1 < 1 && adam_beta2 >= 0 && adam_beta2 < 1)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
}

double lr_schedule(int stage, int epoch_in_stage, const TrainConfig& config) {
  if (epoch_in_stage < 0) throw ConfigError("lr_schedule: negative epoch");
  if (stage == 1) return config.lr_stage1;
  if (stage == 2) return std::ldexp(config.lr_stage2_initial, -(epoch_in_stage / config.lr_halving_period));
  throw ConfigError("lr_schedule: invalid stage " + std::to_string(stage));
}

GeneratorConfig RunConfig::effective_generator() const {
  GeneratorConfig g = generator;
  g.use_global_encoder = train.ablation.use_global;
  return g;
}

void RunConfig::validate() const {
  effective_generator().validate();
  critic.validate();
  train.validate();
  loss.validate();
  if (!(perceptual.width_multiplier > 0.0)) throw ConfigError("perceptual.width_multiplier must be positive");
  if (data.resize != "bilinear") throw ConfigError("data.resize: only \"bilinear\" is supported");
}

json to_json(const RunConfig& c) {
  json j;
  j["generator"] = {{"input_size", c.generator.input_size},
                    {"base_channels", c.generator.base_channels},
                    {"width_multiplier", c.generator.width_multiplier},
                    {"encoder_depth", c.generator.encoder_depth},
                    {"global_feature_channels", c.generator.global_feature_channels},
                    {"batch_norm", c.generator.batch_norm},
                    {"leaky_slope", c.generator.leaky_slope}};
  j["critic"] = {{"in_channels", c.critic.in_channels},
                 {"base_channels", c.critic.base_channels},
                 {"width_multiplier", c.critic.width_multiplier},
                 {"n_strided_layers", c.critic.n_strided_layers},
                 {"spectral_norm", c.critic.spectral_norm},
                 {"power_iterations", c.critic.power_iterations},
                 {"leaky_slope", c.critic.leaky_slope}};
  const auto& a = c.train.ablation;
  j["train"] = {{"stage1_epochs", c.train.stage1_epochs},
                {"stage2_epochs", c.train.stage2_epochs},
                {"lr_stage1", c.train.lr_stage1},
                {"lr_stage2_initial", c.train.lr_stage2_initial},
                {"lr_halving_period", c.train.lr_halving_period},
                {"adam_beta1", c.train.adam_beta1},
                {"adam_beta2", c.train.adam_beta2},
                {"batch_size", c.train.batch_size},
                {"input_noise_std", c.train.input_noise_std},
                {"seed", c.train.seed},
                {"critic_steps_per_gen_step", c.train.critic_steps_per_gen_step},
                {"checkpoint_every", c.train.checkpoint_every},
                {"global_weights", c.train.global_weights},
                {"ablation",
                 {{"use_attention", a.use_attention},
                  {"use_gan", a.use_gan},
                  {"use_perceptual", a.use_perceptual},
                  {"adv_mode", adv_name(a.adv_mode)},
                  {"pretrained_global", a.pretrained_global},
                  {"use_global", a.use_global},
                  {"pixel_mode", pixel_name(a.pixel_mode)}}}};
  j["loss"] = {{"lambda_g", c.loss.lambda_g},
               {"lambda_a", c.loss.lambda_a},
               {"lambda_p", c.loss.lambda_p},
               {"gp_lambda", c.loss.gp_lambda}};
  j["perceptual"] = {{"layer", c.perceptual.layer},
                     {"width_multiplier", c.perceptual.width_multiplier},
                     {"seed", c.perceptual.seed},
                     {"weights", c.perceptual.weights}};
  j["data"] = {{"color_dir", c.data.color_dir},
               {"saliency_dir", c.data.saliency_dir},
               {"split", c.data.split},
               {"resize", c.data.resize}};
  j["output_dir"] = c.output_dir;
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  ObjectReader root(j, "");
  root.object("generator", [&](ObjectReader& r) {
    r.field("input_size", c.generator.input_size);
    r.field("base_channels", c.generator.base_channels);
    r.field("width_multiplier", c.generator.width_multiplier);
    r.field("encoder_depth", c.generator.encoder_depth);
    r.field("global_feature_channels", c.generator.global_feature_channels);
    r.field("batch_norm", c.generator.batch_norm);
    r.field("leaky_slope", c.generator.leaky_slope);
  });
  root.object("critic", [&](ObjectReader& r) {
    r.field("in_channels", c.critic.in_channels);
    r.field("base_channels", c.critic.base_channels);
    r.field("width_multiplier", c.critic.width_multiplier);
    r.field("n_strided_layers", c.critic.n_strided_layers);
    r.field("spectral_norm", c.critic.spectral_norm);
    r.field("power_iterations", c.critic.power_iterations);
    r.field("leaky_slope", c.critic.leaky_slope);
  });
  root.object("train", [&](ObjectReader& r) {
    r.field("stage1_epochs", c.train.stage1_epochs);
    r.field("stage2_epochs", c.train.stage2_epochs);
    r.field("lr_stage1", c.train.lr_stage1);
    r.field("lr_stage2_initial", c.train.lr_stage2_initial);
    r.field("lr_halving_period", c.train.lr_halving_period);
    r.field("adam_beta1", c.train.adam_beta1);
    r.field("adam_beta2", c.train.adam_beta2);
    r.field("batch_size", c.train.batch_size);
    r.field("input_noise_std", c.train.input_noise_std);
    r.field("seed", c.train.seed);
    r.field("critic_steps_per_gen_step", c.train.critic_steps_per_gen_step);
    r.field("checkpoint_every", c.train.checkpoint_every);
    r.field("global_weights", c.train.global_weights);
    r.object("ablation", [&](ObjectReader& a) {
      auto& s = c.train.ablation;
      a.field("use_attention", s.use_attention);
      a.field("use_gan", s.use_gan);
      a.field("use_perceptual", s.use_perceptual);
      a.enumeration("adv_mode", s.adv_mode, {{"wgan", AdvMode::WGAN}, {"lsgan", AdvMode::LSGAN}});
      a.field("pretrained_global", s.pretrained_global);
      a.field("use_global", s.use_global);
      a.enumeration("pixel_mode", s.pixel_mode, {{"l1", PixelMode::L1}, {"l2", PixelMode::L2}});
    });
  });
  root.object("loss", [&](ObjectReader& r) {
    r.field("lambda_g", c.loss.lambda_g);
    r.field("lambda_a", c.loss.lambda_a);
    r.field("lambda_p", c.loss.lambda_p);
    r.field("gp_lambda", c.loss.gp_lambda);
  });
  root.object("perceptual", [&](ObjectReader& r) {
    r.field("layer", c.perceptual.layer);
    r.field("width_multiplier", c.perceptual.width_multiplier);
    r.field("seed", c.perceptual.seed);
    r.field("weights", c.perceptual.weights);
  });
  root.object("data", [&](ObjectReader& r) {
    r.field("color_dir", c.data.color_dir);
    r.field("saliency_dir", c.data.saliency_dir);
    r.field("split", c.data.split);
    r.field("resize", c.data.resize);
  });
  root.field("output_dir", c.output_dir);
  root.finish();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const auto part = key.substr(start, dot - start);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

std::string config_hash(const RunConfig& c) {
  json j = to_json(c);
  j.erase("data");
  j.erase("output_dir");
  j["train"].erase("checkpoint_every");
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig toy_run_config() {
  RunConfig c;
  c.generator.input_size = 64;
  c.generator.width_multiplier = 0.25;
  c.generator.global_feature_channels = 128;
  c.critic.width_multiplier = 0.25;
  c.perceptual.width_multiplier = 0.25;
  c.output_dir = "runs/toy";
  return c;
}

}  // namespace scgan
