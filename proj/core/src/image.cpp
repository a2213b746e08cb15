#include "scgan/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scgan/error.hpp"

namespace scgan {

namespace {

void require_rgb(const Image8& img, const char* op) {
  if (img.channels != 3) {
    throw ShapeError(std::string(op) + ": expected a 3-channel image, got " +
                     std::to_string(img.channels));
  }
}

}  // namespace

Image8::Image8(int h, int w, int c, std::uint8_t fill)
    : height(h), width(w), channels(c),
      data(static_cast<std::size_t>(h) * w * c, fill) {
  if (h < 0 || w < 0 || (c != 1 && c != 3)) {
    throw ShapeError("Image8: invalid shape " + std::to_string(h) + "x" +
                     std::to_string(w) + "x" + std::to_string(c));
  }
}

NetImage normalize(const Image8& img) {
  NetImage out(img.channels, img.height, img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        out.at(c, y, x) = static_cast<float>(img.at(y, x, c) / 127.5 - 1.0);
      }
    }
  }
  return out;
}

Image8 denormalize(const NetImage& img) {
  Image8 out(img.height, img.width, img.channels);
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        const double v = img.at(c, y, x);
        if (!std::isfinite(v)) {
          throw Error("denormalize: non-finite value at (" + std::to_string(c) +
                      "," + std::to_string(y) + "," + std::to_string(x) + ")");
        }
        const double scaled = std::clamp(v, -1.0, 1.0) * 127.5 + 127.5;
        out.at(y, x, c) = static_cast<std::uint8_t>(std::lround(scaled));
      }
    }
  }
  return out;
}

SaliencyMap saliency_from_image(const Image8& img) {
  if (img.channels != 1) {
    throw ShapeError("saliency_from_image: expected a single-channel map");
  }
  SaliencyMap out(1, img.height, img.width);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    out.data[i] = static_cast<float>(img.data[i] / 255.0);
  }
  return out;
}

Image8 saliency_to_image(const SaliencyMap& sal) {
  Image8 out(sal.height, sal.width, 1);
  for (std::size_t i = 0; i < sal.data.size(); ++i) {
    const double v = std::clamp(static_cast<double>(sal.data[i]), 0.0, 1.0);
    out.data[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  return out;
}

Image8 rgb_to_gray(const Image8& img) {
  require_rgb(img, "rgb_to_gray");
  Image8 out(img.height, img.width, 1);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double luma = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] +
                        0.114 * img.data[3 * i + 2];
    out.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(luma), 0L, 255L));
  }
  return out;
}

Image8 gray_to_rgb(const Image8& img) {
  if (img.channels == 3) return img;
  Image8 out(img.height, img.width, 3);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = img.data[i];
  }
  return out;
}

WeightedImage apply_saliency_weight(const NetImage& color, const SaliencyMap& sal) {
  if (color.height != sal.height || color.width != sal.width) {
    throw ShapeError("apply_saliency_weight: image is " + std::to_string(color.height) +
                     "x" + std::to_string(color.width) + " but saliency is " +
                     std::to_string(sal.height) + "x" + std::to_string(sal.width));
  }
  WeightedImage out(color.channels, color.height, color.width);
  for (int c = 0; c < color.channels; ++c) {
    for (int y = 0; y < color.height; ++y) {
      for (int x = 0; x < color.width; ++x) {
        out.at(c, y, x) = color.at(c, y, x) * sal.at(0, y, x);
      }
    }
  }
  return out;
}

OpponentImage rgb_to_opponent(const Image8& img) {
  require_rgb(img, "rgb_to_opponent");
  OpponentImage out;
  out.height = img.height;
  out.width = img.width;
  const std::size_t n = img.pixel_count();
  out.rg.resize(n);
  out.yb.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = img.data[3 * i];
    const double g = img.data[3 * i + 1];
    const double b = img.data[3 * i + 2];
    out.rg[i] = r - g;
    out.yb[i] = (r + g) / 2.0 - b;
  }
  return out;
}

double hue_degrees(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const int r = r8;
  const int g = g8;
  const int b = b8;
  const int mx = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  if (mx == mn) return -1.0;
  const double delta = mx - mn;
  double h = 0.0;
  if (mx == r) {
    h = 60.0 * ((g - b) / delta);
  } else if (mx == g) {
    h = 60.0 * ((b - r) / delta + 2.0);
  } else {
    h = 60.0 * ((r - g) / delta + 4.0);
  }
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  return h;
}

HueMap rgb_to_hue(const Image8& img) {
  require_rgb(img, "rgb_to_hue");
  HueMap out;
  out.height = img.height;
  out.width = img.width;
  const std::size_t n = img.pixel_count();
  out.hue.assign(n, 0.0);
  out.chromatic.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = hue_degrees(img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2]);
    if (h >= 0.0) {
      out.hue[i] = h;
      out.chromatic[i] = 1;
    }
  }
  return out;
}

bool is_grayscale(const Image8& img) {
  if (img.channels == 1) return true;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (img.data[3 * i] != img.data[3 * i + 1] || img.data[3 * i] != img.data[3 * i + 2]) {
      return false;
    }
  }
  return true;
}

}  // namespace scgan
