#include <gtest/gtest.h>

#include <fstream>

#include "scgan/config.hpp"
#include "scgan/error.hpp"
#include "test_util.hpp"

using namespace scgan;
using nlohmann::json;

TEST(Config, DefaultsSerializeFullScaleSettings) {
  const auto j = to_json(RunConfig{});
  EXPECT_EQ(j["generator"]["input_size"], 256);
  EXPECT_EQ(j["train"]["stage1_epochs"], 10);
  EXPECT_EQ(j["train"]["stage2_epochs"], 30);
  EXPECT_EQ(j["train"]["lr_stage1"], 2e-4);
  EXPECT_EQ(j["train"]["lr_stage2_initial"], 1e-4);
  EXPECT_EQ(j["train"]["lr_halving_period"], 10);
  EXPECT_EQ(j["train"]["adam_beta1"], 0.5);
  EXPECT_EQ(j["train"]["adam_beta2"], 0.999);
  EXPECT_EQ(j["train"]["batch_size"], 8);
  EXPECT_EQ(j["train"]["input_noise_std"], 0.005);
  EXPECT_EQ(j["train"]["critic_steps_per_gen_step"], 1);
  EXPECT_EQ(j["loss"]["lambda_g"], 0.05);
  EXPECT_EQ(j["loss"]["lambda_a"], 0.5);
  EXPECT_EQ(j["loss"]["lambda_p"], 5.0);
  EXPECT_EQ(j["loss"]["gp_lambda"], 10.0);
  EXPECT_EQ(j["perceptual"]["layer"], "conv3_3");
  EXPECT_EQ(j["train"]["ablation"]["adv_mode"], "wgan");
  EXPECT_EQ(j["train"]["ablation"]["pixel_mode"], "l1");
}

TEST(Config, JsonRoundTrip) {
  auto c = toy_run_config();
  c.train.ablation.adv_mode = AdvMode::LSGAN;
  c.train.ablation.pixel_mode = PixelMode::L2;
  c.train.seed = 123456789012345ULL;
  c.data.color_dir = "x";
  EXPECT_EQ(to_json(run_config_from_json(to_json(c))), to_json(c));
}

TEST(Config, MissingKeysKeepDefaults) {
  const auto c = run_config_from_json(json::parse(R"({"train": {"batch_size": 2}})"));
  EXPECT_EQ(c.train.batch_size, 2);
  EXPECT_EQ(c.train.stage2_epochs, 30);
}

TEST(Config, UnknownKeyIsNamed) {
  try {
    run_config_from_json(json::parse(R"({"train": {"ablation": {"use_gann": false}}})"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("train.ablation.use_gann"), std::string::npos);
  }
  EXPECT_THROW(run_config_from_json(json::parse(R"({"extra": 1})")), ConfigError);
}

TEST(Config, BadValuesRejected) {
  EXPECT_THROW(run_config_from_json(json::parse(R"({"train": {"batch_size": "eight"}})")), ConfigError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"train": {"batch_size": 0}})")), ConfigError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"train": {"stage1_epochs": -1}})")), ConfigError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"train": {"ablation": {"adv_mode": "hinge"}}})")),
               ConfigError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"generator": {"input_size": 100}})")), ConfigError);
}

TEST(Config, Overrides) {
  json j = to_json(RunConfig{});
  apply_override(j, "train.batch_size=3");
  apply_override(j, "train.ablation.adv_mode=lsgan");
  apply_override(j, "output_dir=out dir");
  const auto c = run_config_from_json(j);
  EXPECT_EQ(c.train.batch_size, 3);
  EXPECT_EQ(c.train.ablation.adv_mode, AdvMode::LSGAN);
  EXPECT_EQ(c.output_dir, "out dir");
  EXPECT_THROW(apply_override(j, "novalue"), ConfigError);
}

TEST(Config, HashIgnoresPathsAndCadence) {
  auto a = toy_run_config();
  auto b = a;
  b.output_dir = "elsewhere";
  b.data.color_dir = "c";
  b.train.checkpoint_every = 7;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.train.seed = 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, LoadFromFile) {
  scgan::testing::TempDir d;
  std::ofstream(d / "c.json") << R"({"train": {"seed": 4}})";
  EXPECT_EQ(load_run_config(d / "c.json").train.seed, 4u);
  std::ofstream(d / "bad.json") << "{";
  EXPECT_THROW(load_run_config(d / "bad.json"), ConfigError);
  EXPECT_THROW(load_run_config(d / "none.json"), IoError);
}

TEST(Config, GlobalSwitchDrivesGenerator) {
  RunConfig c;
  c.train.ablation.use_global = false;
  EXPECT_FALSE(c.effective_generator().use_global_encoder);
}
