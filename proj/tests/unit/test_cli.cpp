#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "scgan/image_io.hpp"
#include "test_util.hpp"

using scgan::testing::read_file;
using scgan::testing::TempDir;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "scgan");
  args.insert(args.begin() + 1, "-q");
  std::ostringstream out, err;
  const int code = scgan::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json print_config(std::vector<std::string> extra = {}) {
  std::vector<std::string> args{"print-config"};
  args.insert(args.end(), extra.begin(), extra.end());
  const auto r = run(args);
  EXPECT_EQ(r.code, 0) << r.err;
  return nlohmann::json::parse(r.out);
}

// Toy dataset plus a config file for a 32-pixel run with one-epoch stages.
struct ToyRun {
  TempDir dir;
  std::string config;

  ToyRun() {
    EXPECT_EQ(run({"make-toy-data", "--n", "4", "--size", "32", "--seed", "3", "--out", (dir / "data").string()}).code,
              0);
    config = (dir / "run.json").string();
    std::ofstream(config) << nlohmann::json{
        {"generator", {{"input_size", 32}}},
        {"train", {{"stage1_epochs", 1}, {"stage2_epochs", 1}, {"batch_size", 4}}},
        {"data", {{"color_dir", (dir / "data/color").string()}, {"saliency_dir", (dir / "data/saliency").string()}}},
        {"output_dir", (dir / "out").string()}};
  }
};

}  // namespace

TEST(Cli, HelpAndUnknownSubcommand) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_NE(run({"frobnicate"}).code, 0);
  EXPECT_NE(run({}).code, 0);
}

TEST(Cli, PrintConfigDefaults) {
  const auto j = print_config();
  EXPECT_EQ(j["train"]["lr_stage1"], 2e-4);
  EXPECT_EQ(j["train"]["batch_size"], 8);
  EXPECT_EQ(j["generator"]["input_size"], 256);
  EXPECT_EQ(print_config({"--toy"})["generator"]["input_size"], 64);
}

TEST(Cli, Precedence) {
  TempDir d;
  std::ofstream(d / "c.json") << R"({"train": {"seed": 5, "batch_size": 2}})";
  const auto file = (d / "c.json").string();
  EXPECT_EQ(print_config({file})["train"]["seed"], 5);
  ::setenv("SCGAN_SEED", "9", 1);
  EXPECT_EQ(print_config({file})["train"]["seed"], 9);
  EXPECT_EQ(print_config({file, "--set", "train.seed=11"})["train"]["seed"], 11);
  EXPECT_EQ(print_config({file, "--set", "train.seed=11", "--seed", "12"})["train"]["seed"], 12);
  ::setenv("SCGAN_SEED", "abc", 1);
  EXPECT_NE(run({"print-config"}).code, 0);
  ::unsetenv("SCGAN_SEED");
  EXPECT_EQ(print_config({file})["train"]["batch_size"], 2);
}

TEST(Cli, UnknownConfigKeyNamed) {
  TempDir d;
  std::ofstream(d / "c.json") << R"({"train": {"batchsize": 2}})";
  const auto r = run({"print-config", (d / "c.json").string()});
  EXPECT_EQ(r.code, scgan::cli::kConfig);
  EXPECT_NE(r.err.find("train.batchsize"), std::string::npos);
  const auto r2 = run({"train", "--set", "loss.lambda_x=1"});
  EXPECT_NE(r2.code, 0);
  EXPECT_NE(r2.err.find("loss.lambda_x"), std::string::npos);
}

TEST(Cli, MakeToyDataIsByteIdentical) {
  TempDir d;
  ASSERT_EQ(run({"make-toy-data", "--n", "2", "--size", "32", "--out", (d / "a").string()}).code, 0);
  ASSERT_EQ(run({"make-toy-data", "--n", "2", "--size", "32", "--out", (d / "b").string()}).code, 0);
  EXPECT_EQ(read_file(d / "a/color/toy_0001.png"), read_file(d / "b/color/toy_0001.png"));
  EXPECT_NE(run({"make-toy-data", "--size", "40", "--out", (d / "c").string()}).code, 0);
}

TEST(Cli, TrainAllThenColorizeEvaluate) {
  ToyRun toy;
  const auto r = run({"train", toy.config, "--toy", "--stage", "all"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(toy.dir / "out/stage1/manifest.json"));
  EXPECT_TRUE(std::filesystem::exists(toy.dir / "out/stage2/manifest.json"));
  EXPECT_TRUE(std::filesystem::exists(toy.dir / "out/stage2/losses.csv"));

  // Gray input of a size the network cannot take directly.
  scgan::Image8 gray(40, 36, 1, 100);
  scgan::write_image(toy.dir / "in/g.png", gray);
  scgan::write_image(toy.dir / "in/c.png", scgan::read_image(toy.dir / "data/color/toy_0000.png"));
  const auto ckpt = (toy.dir / "out/stage2").string();
  const auto c = run({"colorize", "--checkpoint", ckpt, "--input", (toy.dir / "in").string(), "--output",
                      (toy.dir / "col").string(), "--save-saliency", "--save-weighted"});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto out = scgan::read_image(toy.dir / "col/g.png");
  EXPECT_EQ(out.channels, 3);
  EXPECT_EQ(out.height, 40);
  EXPECT_EQ(out.width, 36);
  const auto sal = scgan::read_image(toy.dir / "col/saliency/g.png");
  EXPECT_EQ(sal.channels, 1);
  EXPECT_EQ(sal.height, 40);
  EXPECT_EQ(scgan::read_image(toy.dir / "col/weighted/c.png").channels, 3);
  EXPECT_EQ(scgan::read_image(toy.dir / "col/c.png").height, 32);

  // Same inputs, same bytes.
  ASSERT_EQ(run({"colorize", "--checkpoint", ckpt, "--input", (toy.dir / "in/g.png").string(), "--output",
                 (toy.dir / "col2").string()})
                .code,
            0);
  EXPECT_EQ(read_file(toy.dir / "col/g.png"), read_file(toy.dir / "col2/g.png"));

  const auto prefix = (toy.dir / "rep/self").string();
  const auto e = run({"evaluate", "--pred", (toy.dir / "col").string(), "--gt", (toy.dir / "col").string(), "--out",
                      prefix});
  ASSERT_EQ(e.code, 0) << e.err;
  const auto j = nlohmann::json::parse(read_file(prefix + ".json"));
  EXPECT_EQ(j["aggregates"]["mean_ssim"], 1.0);
  EXPECT_EQ(j["aggregates"]["cci_quartiles"].size(), 3u);

  std::filesystem::remove(toy.dir / "col/g.png");
  const auto bad = run({"evaluate", "--pred", (toy.dir / "col").string(), "--gt", (toy.dir / "col2").string(),
                        "--out", prefix});
  EXPECT_NE(bad.code, 0);
  EXPECT_NE(bad.err.find("c.png"), std::string::npos);
}

TEST(Cli, Stage2NeedsStage1OrFromScratch) {
  ToyRun toy;
  const auto r = run({"train", toy.config, "--toy", "--stage", "2"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("stage-1 checkpoint"), std::string::npos);
  EXPECT_EQ(run({"train", toy.config, "--toy", "--stage", "2", "--from-scratch"}).code, 0);
  EXPECT_TRUE(std::filesystem::exists(toy.dir / "out/stage2/manifest.json"));
}

TEST(Cli, ResumeRefusesMismatchedHash) {
  ToyRun toy;
  ASSERT_EQ(run({"train", toy.config, "--toy", "--stage", "1"}).code, 0);
  const auto r = run({"train", toy.config, "--toy", "--stage", "1", "--set", "train.lr_stage1=0.001", "--resume",
                      (toy.dir / "out/stage1").string()});
  EXPECT_EQ(r.code, scgan::cli::kConfig);
  EXPECT_NE(r.err.find("hash"), std::string::npos);
  const auto ok = run({"train", toy.config, "--toy", "--stage", "2", "--resume", (toy.dir / "out/stage1").string()});
  EXPECT_EQ(ok.code, 0) << ok.err;
}

TEST(Cli, TrainNeedsData) {
  const auto r = run({"train", "--toy"});
  EXPECT_EQ(r.code, scgan::cli::kConfig);
}

TEST(Cli, AnalyzeHue) {
  TempDir d;
  ASSERT_EQ(run({"make-toy-data", "--n", "3", "--size", "128", "--out", (d / "t").string()}).code, 0);
  const auto r = run({"analyze-hue", "--images", (d / "t/color").string(), "--saliency",
                      (d / "t/saliency").string(), "--out", (d / "hue").string(), "--patch", "32"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(read_file(d / "hue.json"));
  EXPECT_EQ(j["options"]["patch"], 32);
  EXPECT_EQ(j["classes"]["unsalient"]["chromatic_pixels"], 0);
  EXPECT_TRUE(std::filesystem::exists(d / "hue.csv"));
  EXPECT_EQ(nlohmann::json::parse(read_file(d / "hue.json")), j);

  std::filesystem::create_directories(d / "e1");
  std::filesystem::create_directories(d / "e2");
  EXPECT_NE(run({"analyze-hue", "--images", (d / "e1").string(), "--saliency", (d / "e2").string(), "--out",
                 (d / "x").string()})
                .code,
            0);
}
