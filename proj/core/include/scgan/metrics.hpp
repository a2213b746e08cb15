#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "scgan/image.hpp"

namespace scgan {

inline constexpr double kCciOptimumLow = 16.0;
inline constexpr double kCciOptimumHigh = 20.0;

/// Peak signal-to-noise ratio in dB over all channels jointly. Identical
/// images give +infinity.
double psnr(const Image8& a, const Image8& b);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

/// Single-scale SSIM on BT.601 luma (unrounded), Gaussian window, mean over
/// every fully-inside window position.
double ssim(const Image8& a, const Image8& b, const SsimOptions& options = {});

/// Luma plane in double precision, row-major.
std::vector<double> luma_plane(const Image8& img);

enum class CciForm {
  /// sigma_rgyb + 0.3 mu_rgyb over the opponent planes (population statistics).
  Hasler,
  /// Mean HSV saturation plus its standard deviation, saturation in percent.
  Saturation,
};

struct CciRecord {
  double cci = 0.0;
  bool in_optimum = false;
};

CciRecord cci(const Image8& img, CciForm form = CciForm::Hasler);
[[nodiscard]] inline bool in_cci_optimum(double value) {
  return value >= kCciOptimumLow && value <= kCciOptimumHigh;
}

/// Count ratio kept as an exact pair of integers.
struct Fraction {
  std::size_t numerator = 0;
  std::size_t denominator = 1;
  [[nodiscard]] double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Share of images whose CCI lies in [16, 20]. Throws on an empty set.
Fraction cci_ratio(std::span<const Image8> images, CciForm form = CciForm::Hasler);
Fraction cci_ratio(std::span<const CciRecord> records);

/// Box-plot statistics: quartiles by linear interpolation between order
/// statistics, whiskers at the most extreme data within 1.5 IQR.
struct BoxStats {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
};

BoxStats box_stats(std::vector<double> values);
double quantile(std::vector<double> values, double q);

struct MetricsRow {
  std::string file;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double cci = 0.0;
  bool in_optimum = false;
};

struct MetricsReport {
  std::vector<MetricsRow> rows;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
  double mean_cci = 0.0;
  Fraction cci_ratio;
  BoxStats cci_box;
};

MetricsReport build_report(std::vector<MetricsRow> rows);

/// Matches files by basename (extension-insensitive) and scores each
/// prediction against its ground truth. Mismatched sets throw IoError listing
/// the unmatched files.
MetricsReport evaluate_pairs(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir);

/// Writes `<prefix>.csv` and `<prefix>.json`. Infinite PSNR is written as "inf".
void write_report(const MetricsReport& report, const std::filesystem::path& prefix);

}  // namespace scgan
