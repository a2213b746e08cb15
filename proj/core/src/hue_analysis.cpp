#include "scgan/hue_analysis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "scgan/error.hpp"
#include "scgan/image_io.hpp"

namespace scgan {

std::string to_string(PatchClass c) {
  switch (c) {
    case PatchClass::Salient:
      return "salient";
    case PatchClass::Unsalient:
      return "unsalient";
    case PatchClass::Random:
      return "random";
  }
  return "unknown";
}

void HueHistogram::add_pixel(double hue) {
  const auto bin = std::min<std::size_t>(static_cast<std::size_t>(hue), 359);
  ++bins[bin];
  ++chromatic_pixels;
  if (hue >= kGreenBlueLow && hue < kGreenBlueHigh) ++green_blue_pixels;
  const double rad = hue * std::numbers::pi / 180.0;
  sum_cos += std::cos(rad);
  sum_sin += std::sin(rad);
}

void HueHistogram::merge(const HueHistogram& o) {
  for (std::size_t i = 0; i < bins.size(); ++i) bins[i] += o.bins[i];
  chromatic_pixels += o.chromatic_pixels;
  green_blue_pixels += o.green_blue_pixels;
  patches += o.patches;
  sum_cos += o.sum_cos;
  sum_sin += o.sum_sin;
}

double HueHistogram::green_blue_fraction() const {
  if (chromatic_pixels == 0) return 0.0;
  return static_cast<double>(green_blue_pixels) / static_cast<double>(chromatic_pixels);
}

double HueHistogram::circular_variance() const {
  if (chromatic_pixels == 0) return 0.0;
  const double n = static_cast<double>(chromatic_pixels);
  return 1.0 - std::hypot(sum_cos / n, sum_sin / n);
}

const HueHistogram& HueAnalysis::at(PatchClass c) const {
  switch (c) {
    case PatchClass::Salient:
      return salient;
    case PatchClass::Unsalient:
      return unsalient;
    case PatchClass::Random:
    default:
      return random;
  }
}

void HueAnalysis::merge(const HueAnalysis& o) {
  salient.merge(o.salient);
  unsalient.merge(o.unsalient);
  random.merge(o.random);
}

namespace {

void accumulate_patch(const Image8& img, int y0, int x0, int patch, HueHistogram& hist) {
  ++hist.patches;
  for (int y = y0; y < y0 + patch; ++y) {
    for (int x = x0; x < x0 + patch; ++x) {
      const double h = hue_degrees(img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2));
      if (h >= 0.0) hist.add_pixel(h);
    }
  }
}

}  // namespace

HueAnalysis salient_patch_hue_analysis(const Image8& img, const SaliencyMap& sal, const HueAnalysisOptions& o) {
  if (img.channels != 3) throw ShapeError("hue analysis: expected a 3-channel image");
  if (sal.height != img.height || sal.width != img.width) {
    throw ShapeError("hue analysis: saliency map size differs from image size");
  }
  if (o.patch < 1 || img.height < o.patch || img.width < o.patch) {
    throw ShapeError("hue analysis: image " + std::to_string(img.height) + "x" + std::to_string(img.width) +
                     " is smaller than the " + std::to_string(o.patch) + " pixel patch");
  }

  HueAnalysis out;
  const int rows = img.height / o.patch;
  const int cols = img.width / o.patch;
  const double area = static_cast<double>(o.patch) * o.patch;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int y0 = r * o.patch;
      const int x0 = c * o.patch;
      std::size_t high = 0;
      for (int y = y0; y < y0 + o.patch; ++y) {
        for (int x = x0; x < x0 + o.patch; ++x) {
          if (sal.at(0, y, x) > o.high_threshold) ++high;
        }
      }
      if (static_cast<double>(high) >= o.coverage * area) {
        accumulate_patch(img, y0, x0, o.patch, out.salient);
      } else if (high == 0) {
        accumulate_patch(img, y0, x0, o.patch, out.unsalient);
      }
    }
  }

  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<int> ys(0, img.height - o.patch);
  std::uniform_int_distribution<int> xs(0, img.width - o.patch);
  const int draws = o.random_patches > 0 ? o.random_patches : rows * cols;
  for (int i = 0; i < draws; ++i) {
    const int y0 = ys(rng);
    const int x0 = xs(rng);
    accumulate_patch(img, y0, x0, o.patch, out.random);
  }
  return out;
}

HueAnalysis analyze_hue_dirs(const std::filesystem::path& images_dir, const std::filesystem::path& saliency_dir,
                             const HueAnalysisOptions& options) {
  const auto images = images_by_stem(images_dir);
  const auto maps = images_by_stem(saliency_dir);
  std::vector<std::string> unpaired;
  for (const auto& [stem, path] : images) {
    if (!maps.count(stem)) unpaired.push_back(path.string());
  }
  for (const auto& [stem, path] : maps) {
    if (!images.count(stem)) unpaired.push_back(path.string());
  }
  if (!unpaired.empty()) {
    std::string msg = "hue analysis: unpaired files:";
    for (const auto& f : unpaired) msg += "\n  " + f;
    throw IoError(msg);
  }
  if (images.empty()) throw IoError("hue analysis: no images in " + images_dir.string());

  HueAnalysis total;
  std::uint64_t i = 0;
  for (const auto& [stem, path] : images) {
    Image8 img = read_image(path);
    if (img.channels == 1) img = gray_to_rgb(img);
    Image8 sal8 = read_gray_image(maps.at(stem));
    if (sal8.height != img.height || sal8.width != img.width) sal8 = resize_bilinear(sal8, img.height, img.width);
    HueAnalysisOptions o = options;
    o.seed = options.seed + i++;
    total.merge(salient_patch_hue_analysis(img, saliency_from_image(sal8), o));
  }
  return total;
}

void write_hue_report(const HueAnalysis& analysis, const HueAnalysisOptions& options,
                      const std::filesystem::path& prefix) {
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
  const PatchClass classes[] = {PatchClass::Salient, PatchClass::Unsalient, PatchClass::Random};

  nlohmann::json j;
  j["options"] = {{"patch", options.patch},
                  {"high_threshold", options.high_threshold},
                  {"coverage", options.coverage},
                  {"seed", options.seed},
                  {"random_patches", options.random_patches},
                  {"green_blue_range_deg", {kGreenBlueLow, kGreenBlueHigh}}};
  for (auto c : classes) {
    const auto& h = analysis.at(c);
    j["classes"][to_string(c)] = {{"patches", h.patches},
                                  {"empty", h.empty()},
                                  {"chromatic_pixels", h.chromatic_pixels},
                                  {"green_blue_pixels", h.green_blue_pixels},
                                  {"green_blue_fraction", h.green_blue_fraction()},
                                  {"circular_variance", h.circular_variance()},
                                  {"histogram", h.bins}};
  }
  const auto json_path = prefix.string() + ".json";
  std::ofstream js(json_path, std::ios::trunc);
  if (!js) throw IoError("cannot write " + json_path);
  js << j.dump(2) << '\n';

  const auto csv_path = prefix.string() + ".csv";
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw IoError("cannot write " + csv_path);
  csv << "class,patches,chromatic_pixels,green_blue_pixels,green_blue_fraction,circular_variance\n";
  char buf[64];
  for (auto c : classes) {
    const auto& h = analysis.at(c);
    csv << to_string(c) << ',' << h.patches << ',' << h.chromatic_pixels << ',' << h.green_blue_pixels;
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", h.green_blue_fraction(), h.circular_variance());
    csv << buf;
  }
}

}  // namespace scgan
