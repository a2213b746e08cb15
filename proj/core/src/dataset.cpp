#include "scgan/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "scgan/error.hpp"
#include "scgan/image_io.hpp"
#include "scgan/tensor_bridge.hpp"
#include "scgan/log.hpp"

namespace scgan {

namespace fs = std::filesystem;

DatasetIndex build_index(const fs::path& color_dir, const fs::path& saliency_dir, const std::string& split) {
  const auto colors = images_by_stem(color_dir);
  const auto saliencies = images_by_stem(saliency_dir);

  DatasetIndex index;
  index.split = split;
  std::vector<std::string> orphans;
  for (const auto& [stem, path] : colors) {
    const auto it = saliencies.find(stem);
    if (it == saliencies.end()) {
      orphans.push_back(path.filename().string());
      continue;
    }
    if (is_grayscale(read_image(path))) {
      log::info("dataset: excluding grayscale-encoded image " + path.string());
      index.excluded_gray.push_back(path);
      continue;
    }
    index.entries.push_back({path, it->second, stem});
  }
  if (!orphans.empty()) {
    std::string msg = "color images without a saliency map:";
    for (const auto& o : orphans) msg += " " + o;
    throw IoError(msg);
  }
  return index;
}

TrainingSample make_sample(const Image8& color, const Image8& saliency, int size, std::string id) {
  if (saliency.channels != 1) throw ShapeError("saliency map must be single-channel: " + id);
  const Image8 rgb = resize_bilinear(gray_to_rgb(color), size, size);
  const Image8 sal = resize_bilinear(saliency, size, size);
  TrainingSample s;
  s.c = to_tensor(normalize(rgb));
  s.x = to_tensor(normalize(rgb_to_gray(rgb)));
  s.s = to_tensor(saliency_from_image(sal));
  s.id = std::move(id);
  return s;
}

TrainingSample load_sample(const DatasetEntry& entry, int target_size) {
  Image8 color;
  Image8 sal;
  try {
    color = read_image(entry.color);
    sal = read_gray_image(entry.saliency);
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError("cannot load sample '" + entry.id + "': " + e.what());
  }
  return make_sample(color, sal, target_size, entry.id);
}

Batch collate(const SampleSource& source, const std::vector<std::int64_t>& indices) {
  std::vector<torch::Tensor> xs, cs, ss;
  xs.reserve(indices.size());
  cs.reserve(indices.size());
  ss.reserve(indices.size());
  for (auto i : indices) {
    auto s = source.get(static_cast<std::size_t>(i));
    xs.push_back(s.x);
    cs.push_back(s.c);
    ss.push_back(s.s);
  }
  return {torch::stack(xs), torch::stack(cs), torch::stack(ss)};
}

namespace {
constexpr double kMinLumaContrast = 40.0;
}  // namespace

std::vector<ToySample> make_toy_images(int n, int size, std::uint64_t seed) {
  if (n < 1) throw ConfigError("toy dataset: n must be >= 1");
  if (size <= 0 || size % 32 != 0) {
    throw ConfigError("toy dataset: size " + std::to_string(size) + " is not a positive multiple of 32");
  }
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };

  std::vector<ToySample> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    ToySample t;
    char id[32];
    std::snprintf(id, sizeof(id), "toy_%04d", k);
    t.id = id;
    // Mid-gray normalizes to ~0, where the weighted image hides saliency, so
    // backgrounds come from a dark or a bright band.
    const double bg_level = uniform(0.0, 1.0) < 0.5 ? uniform(20.0, 70.0) : uniform(185.0, 235.0);
    const auto bg = static_cast<std::uint8_t>(std::lround(bg_level));
    t.color = Image8(size, size, 3, bg);
    t.saliency = Image8(size, size, 1, 0);

    const int shapes = 1 + static_cast<int>(uniform(0.0, 2.0));
    for (int sidx = 0; sidx < shapes; ++sidx) {
      // Saturated colour from HSV; a saturation floor keeps R = G = B impossible.
      // Redrawn until its luma stands apart from the background, so the shape
      // is visible in the grayscale input.
      std::uint8_t rgb[3];
      do {
        const double hue = uniform(0.0, 360.0);
        const double sat = uniform(0.6, 1.0);
        const double val = uniform(0.6, 1.0);
        const double chroma = val * sat;
        const double hp = hue / 60.0;
        const double xc = chroma * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
        double r = 0, g = 0, b = 0;
        switch (static_cast<int>(hp) % 6) {
          case 0: r = chroma; g = xc; break;
          case 1: r = xc; g = chroma; break;
          case 2: g = chroma; b = xc; break;
          case 3: g = xc; b = chroma; break;
          case 4: r = xc; b = chroma; break;
          default: r = chroma; b = xc; break;
        }
        const double m = val - chroma;
        rgb[0] = static_cast<std::uint8_t>(std::lround((r + m) * 255.0));
        rgb[1] = static_cast<std::uint8_t>(std::lround((g + m) * 255.0));
        rgb[2] = static_cast<std::uint8_t>(std::lround((b + m) * 255.0));
      } while (std::abs(0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2] - bg) < kMinLumaContrast);

      const double half = uniform(size / 8.0, size / 4.0);
      const double cx = uniform(half, size - half);
      const double cy = uniform(half, size - half);
      const bool circle = uniform(0.0, 1.0) < 0.5;
      for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
          const double dx = x + 0.5 - cx;
          const double dy = y + 0.5 - cy;
          const bool inside = circle ? dx * dx + dy * dy <= half * half
                                     : std::abs(dx) <= half && std::abs(dy) <= half;
          if (!inside) continue;
          for (int c = 0; c < 3; ++c) t.color.at(y, x, c) = rgb[c];
          t.saliency.at(y, x, 0) = 255;
        }
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

void write_toy_dataset(const std::vector<ToySample>& samples, const fs::path& dir) {
  for (const auto& s : samples) {
    write_image(dir / "color" / (s.id + ".png"), s.color);
    write_image(dir / "saliency" / (s.id + ".png"), s.saliency);
  }
}

std::vector<TrainingSample> to_training_samples(const std::vector<ToySample>& samples) {
  std::vector<TrainingSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(make_sample(s.color, s.saliency, s.color.height, s.id));
  return out;
}

}  // namespace scgan
