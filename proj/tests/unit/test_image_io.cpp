#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "scgan/error.hpp"
#include "scgan/image_io.hpp"
#include "test_util.hpp"

using namespace scgan;
using scgan::testing::TempDir;

TEST(ImageIo, PngRoundTripRgbAndGray) {
  TempDir dir;
  std::mt19937_64 rng(1);
  const auto rgb = oracle::random_image(9, 7, 3, rng);
  const auto gray = oracle::random_image(5, 4, 1, rng);
  write_image(dir / "sub/rgb.png", rgb);
  write_image(dir / "gray.png", gray);
  const auto rgb2 = read_image(dir / "sub/rgb.png");
  EXPECT_TRUE(rgb2.same_shape(rgb));
  EXPECT_EQ(rgb2.data, rgb.data);
  const auto gray2 = read_image(dir / "gray.png");
  EXPECT_EQ(gray2.channels, 1);
  EXPECT_EQ(gray2.data, gray.data);
}

TEST(ImageIo, RgbOrderIsPreserved) {
  TempDir dir;
  Image8 red(1, 1, 3);
  red.data = {200, 10, 20};
  write_image(dir / "red.png", red);
  EXPECT_EQ(read_image(dir / "red.png").data, red.data);
  EXPECT_EQ(read_gray_image(dir / "red.png").channels, 1);
}

TEST(ImageIo, MissingFileThrows) {
  EXPECT_THROW(read_image("/nonexistent/x.png"), IoError);
}

TEST(ImageIo, ResizeShapes) {
  const auto out = resize_bilinear(Image8(384, 512, 3, 17), 64, 64);
  EXPECT_EQ(out.height, 64);
  EXPECT_EQ(out.width, 64);
  EXPECT_EQ(out.channels, 3);
  EXPECT_EQ(out.data[100], 17);
  EXPECT_EQ(resize_bilinear(Image8(10, 10, 1, 3), 5, 20).channels, 1);
}

TEST(ImageIo, StemsAreSortedAndCaseInsensitive) {
  TempDir dir;
  write_image(dir / "b.PNG", Image8(2, 2, 1));
  write_image(dir / "a.jpg", Image8(2, 2, 3));
  std::ofstream(dir / "notes.txt") << "x";
  const auto stems = images_by_stem(dir.path());
  ASSERT_EQ(stems.size(), 2u);
  EXPECT_EQ(stems.begin()->first, "a");
  EXPECT_EQ(std::next(stems.begin())->first, "b");
}

TEST(ImageIo, DuplicateStemThrows) {
  TempDir dir;
  write_image(dir / "a.png", Image8(2, 2, 1));
  write_image(dir / "a.jpg", Image8(2, 2, 1));
  EXPECT_THROW(images_by_stem(dir.path()), IoError);
  EXPECT_THROW(images_by_stem(dir / "missing"), IoError);
}
