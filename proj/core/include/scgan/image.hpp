#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace scgan {

/// 8-bit image, interleaved HWC. Channels is 1 or 3 (RGB order).
struct Image8 {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;

  Image8() = default;
  Image8(int h, int w, int c, std::uint8_t fill = 0);

  [[nodiscard]] std::size_t pixel_count() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  [[nodiscard]] std::uint8_t& at(int y, int x, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  [[nodiscard]] std::uint8_t at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  [[nodiscard]] bool same_shape(const Image8& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
};

/// Planar float image, CHW. The tag keeps the value-range semantics of the
/// different image kinds from mixing silently.
template <class Tag>
struct PlanarImage {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  PlanarImage() = default;
  PlanarImage(int c, int h, int w, float fill = 0.0F)
      : channels(c), height(h), width(w),
        data(static_cast<std::size_t>(c) * h * w, fill) {}

  [[nodiscard]] float& at(int c, int y, int x) {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  [[nodiscard]] float at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  [[nodiscard]] std::span<const float> plane(int c) const {
    return {data.data() + static_cast<std::size_t>(c) * height * width,
            static_cast<std::size_t>(height) * width};
  }
};

struct NetImageTag {};
struct SaliencyTag {};
struct WeightedTag {};

/// Network-range image, values in [-1, 1].
using NetImage = PlanarImage<NetImageTag>;
/// Single-channel map with values in [0, 1].
using SaliencyMap = PlanarImage<SaliencyTag>;
/// Color image multiplied by a saliency map.
using WeightedImage = PlanarImage<WeightedTag>;

/// Opponent color planes, row-major.
struct OpponentImage {
  int height = 0;
  int width = 0;
  std::vector<double> rg;  // R - G
  std::vector<double> yb;  // (R + G) / 2 - B
};

/// Per-pixel HSV hue in degrees. Achromatic pixels (R = G = B) are masked.
struct HueMap {
  int height = 0;
  int width = 0;
  std::vector<double> hue;
  std::vector<std::uint8_t> chromatic;  // 1 where hue is defined
};

NetImage normalize(const Image8& img);
Image8 denormalize(const NetImage& img);

/// Maps an 8-bit single-channel map linearly to [0, 1].
SaliencyMap saliency_from_image(const Image8& img);
Image8 saliency_to_image(const SaliencyMap& sal);

Image8 rgb_to_gray(const Image8& img);
/// Replicates a single-channel image across three channels.
Image8 gray_to_rgb(const Image8& img);

WeightedImage apply_saliency_weight(const NetImage& color, const SaliencyMap& sal);

OpponentImage rgb_to_opponent(const Image8& img);
HueMap rgb_to_hue(const Image8& img);

/// Hue of a single RGB triple in degrees, or a negative value when achromatic.
double hue_degrees(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// True when every pixel has R = G = B (single-channel images are gray too).
bool is_grayscale(const Image8& img);

}  // namespace scgan
