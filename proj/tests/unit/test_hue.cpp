#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "scgan/dataset.hpp"
#include "scgan/error.hpp"
#include "scgan/hue_analysis.hpp"
#include "scgan/image_io.hpp"
#include "test_util.hpp"

using namespace scgan;
using scgan::testing::TempDir;

namespace {

Image8 solid(int size, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Image8 img(size, size, 3);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    img.data[p * 3] = r;
    img.data[p * 3 + 1] = g;
    img.data[p * 3 + 2] = b;
  }
  return img;
}

}  // namespace

TEST(HueAnalysis, AllGreenFullySalient) {
  const auto a = salient_patch_hue_analysis(solid(128, 0, 200, 0), SaliencyMap(1, 128, 128, 1.0F));
  EXPECT_EQ(a.salient.patches, 4u);
  EXPECT_TRUE(a.unsalient.empty());
  EXPECT_DOUBLE_EQ(a.salient.green_blue_fraction(), 1.0);
  EXPECT_EQ(a.salient.bins[120], a.salient.chromatic_pixels);
  EXPECT_NEAR(a.salient.circular_variance(), 0.0, 1e-12);
}

TEST(HueAnalysis, AllRedIsNeverGreenBlue) {
  SaliencyMap sal(1, 128, 128, 0.0F);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 128; ++x) sal.at(0, y, x) = 1.0F;
  const auto a = salient_patch_hue_analysis(solid(128, 220, 10, 10), sal);
  EXPECT_EQ(a.salient.patches, 2u);
  EXPECT_EQ(a.unsalient.patches, 2u);
  for (auto c : {PatchClass::Salient, PatchClass::Unsalient, PatchClass::Random}) {
    EXPECT_EQ(a.at(c).green_blue_fraction(), 0.0) << to_string(c);
  }
}

TEST(HueAnalysis, CoverageAndPatchSize) {
  SaliencyMap sal(1, 64, 64, 0.0F);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 25; ++x) sal.at(0, y, x) = 0.9F;  // 25/32 < 80 % of the first 32-pixel tile
  HueAnalysisOptions o;
  o.patch = 32;
  const auto a = salient_patch_hue_analysis(solid(64, 0, 0, 255), sal, o);
  EXPECT_EQ(a.salient.patches, 0u);
  EXPECT_EQ(a.unsalient.patches, 3u);
  EXPECT_EQ(a.random.patches, 4u);
  o.patch = 128;
  EXPECT_THROW(salient_patch_hue_analysis(solid(64, 0, 0, 255), sal, o), ShapeError);
}

TEST(HueAnalysis, FractionsComplementAndRandomIsSeeded) {
  const auto toy = make_toy_images(1, 128, 2)[0];
  const auto sal = saliency_from_image(toy.saliency);
  HueAnalysisOptions o;
  o.patch = 32;
  o.seed = 5;
  const auto a = salient_patch_hue_analysis(toy.color, sal, o);
  const auto b = salient_patch_hue_analysis(toy.color, sal, o);
  EXPECT_EQ(a.random.bins, b.random.bins);
  for (auto c : {PatchClass::Salient, PatchClass::Unsalient, PatchClass::Random}) {
    const auto& h = a.at(c);
    if (h.chromatic_pixels == 0) continue;
    const double non_gb = static_cast<double>(h.chromatic_pixels - h.green_blue_pixels) / h.chromatic_pixels;
    EXPECT_NEAR(h.green_blue_fraction() + non_gb, 1.0, 1e-15);
  }
}

TEST(HueAnalysis, ToyUnsalientPatchesAreAchromatic) {
  TempDir d;
  write_toy_dataset(make_toy_images(6, 128, 4), d.path());
  HueAnalysisOptions o;
  o.patch = 16;
  const auto a = analyze_hue_dirs(d / "color", d / "saliency", o);
  EXPECT_GT(a.unsalient.patches, 0u);
  EXPECT_EQ(a.unsalient.chromatic_pixels, 0u);
  EXPECT_GT(a.salient.patches, 0u);
  EXPECT_GT(a.salient.chromatic_pixels, 0u);

  write_hue_report(a, o, d / "out/hue");
  const auto j = nlohmann::json::parse(scgan::testing::read_file(d / "out/hue.json"));
  EXPECT_EQ(j["options"]["patch"], 16);
  EXPECT_EQ(j["classes"]["salient"]["histogram"].size(), 360u);
  const auto csv = scgan::testing::read_file(d / "out/hue.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(HueAnalysis, UnpairedAndEmptyDirectories) {
  TempDir d;
  write_image(d / "img/a.png", Image8(64, 64, 3));
  write_image(d / "sal/b.png", Image8(64, 64, 1));
  EXPECT_THROW(analyze_hue_dirs(d / "img", d / "sal"), IoError);
  std::filesystem::create_directories(d / "e1");
  std::filesystem::create_directories(d / "e2");
  EXPECT_THROW(analyze_hue_dirs(d / "e1", d / "e2"), IoError);
}
