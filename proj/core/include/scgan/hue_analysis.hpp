#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "scgan/image.hpp"

namespace scgan {

enum class PatchClass { Salient, Unsalient, Random };

std::string to_string(PatchClass c);

/// Hue statistics of one patch class, accumulated over chromatic pixels only.
struct HueHistogram {
  std::array<std::uint64_t, 360> bins{};  // one-degree bins
  std::uint64_t chromatic_pixels = 0;
  std::uint64_t green_blue_pixels = 0;    // hue in [90, 270)
  std::uint64_t patches = 0;
  double sum_cos = 0.0;
  double sum_sin = 0.0;

  void add_pixel(double hue_deg);
  void merge(const HueHistogram& other);

  /// Green-blue share of chromatic pixels; 0 when there are none.
  [[nodiscard]] double green_blue_fraction() const;
  /// 1 - |mean unit hue vector|, in [0, 1]; 0 when there are no pixels.
  [[nodiscard]] double circular_variance() const;
  [[nodiscard]] bool empty() const { return patches == 0; }
};

struct HueAnalysis {
  HueHistogram salient;
  HueHistogram unsalient;
  HueHistogram random;

  [[nodiscard]] const HueHistogram& at(PatchClass c) const;
  void merge(const HueAnalysis& other);
};

struct HueAnalysisOptions {
  int patch = 64;
  /// A pixel counts as high-saliency when its value exceeds this.
  double high_threshold = 0.5;
  /// Minimum share of high-saliency pixels for a salient patch.
  double coverage = 0.80;
  std::uint64_t seed = 0;
  /// Random patches drawn per image; 0 means one per grid tile.
  int random_patches = 0;
};

inline constexpr double kGreenBlueLow = 90.0;
inline constexpr double kGreenBlueHigh = 270.0;

/// Tiles the image with non-overlapping patch x patch cells. A cell is
/// salient when at least `coverage` of its pixels exceed `high_threshold`,
/// unsalient when none do. Random cells are drawn uniformly over all valid
/// positions. Classes with no qualifying patch are left empty.
HueAnalysis salient_patch_hue_analysis(const Image8& img, const SaliencyMap& saliency,
                                       const HueAnalysisOptions& options = {});

/// Per-directory analysis: images and saliency maps paired by basename,
/// per-image results merged. Image i uses seed `options.seed + i` for its
/// random patches. Unpaired files or empty directories throw IoError.
HueAnalysis analyze_hue_dirs(const std::filesystem::path& images_dir, const std::filesystem::path& saliency_dir,
                             const HueAnalysisOptions& options = {});

/// Writes `<prefix>.json` (per-class summary and histograms, options) and
/// `<prefix>.csv` (one summary row per class).
void write_hue_report(const HueAnalysis& analysis, const HueAnalysisOptions& options,
                      const std::filesystem::path& prefix);

}  // namespace scgan
