#include "scgan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "scgan/error.hpp"
#include "scgan/image_io.hpp"

namespace scgan {

namespace {

void require_same_shape(const Image8& a, const Image8& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + std::to_string(a.height) + "x" +
                     std::to_string(a.width) + "x" + std::to_string(a.channels) + " vs " +
                     std::to_string(b.height) + "x" + std::to_string(b.width) + "x" + std::to_string(b.channels));
  }
}

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> w(size);
  const double center = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    w[i] = std::exp(-((i - center) * (i - center)) / (2.0 * sigma * sigma));
    sum += w[i];
  }
  for (auto& v : w) v /= sum;
  return w;
}

// Separable "valid" filtering: output is (h - k + 1) x (w - k + 1).
std::vector<double> filter_valid(const std::vector<double>& in, int h, int w, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = w - n + 1;
  const int oh = h - n + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[i] * in[static_cast<std::size_t>(y) * w + x + i];
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

double population_std(const Eigen::ArrayXd& v) {
  return std::sqrt((v - v.mean()).square().mean());
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

nlohmann::json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

double psnr(const Image8& a, const Image8& b) {
  require_same_shape(a, b, "psnr");
  if (a.data.empty()) throw ShapeError("psnr: empty images");
  std::uint64_t sse = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const int d = static_cast<int>(a.data[i]) - static_cast<int>(b.data[i]);
    sse += static_cast<std::uint64_t>(d * d);
  }
  if (sse == 0) return std::numeric_limits<double>::infinity();
  const double mse = static_cast<double>(sse) / static_cast<double>(a.data.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

std::vector<double> luma_plane(const Image8& img) {
  std::vector<double> out(img.pixel_count());
  if (img.channels == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = img.data[i];
    return out;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] + 0.114 * img.data[3 * i + 2];
  }
  return out;
}

double ssim(const Image8& a, const Image8& b, const SsimOptions& o) {
  require_same_shape(a, b, "ssim");
  if (a.height < o.window || a.width < o.window) {
    throw ShapeError("ssim: image " + std::to_string(a.height) + "x" + std::to_string(a.width) +
                     " is smaller than the " + std::to_string(o.window) + "x" + std::to_string(o.window) +
                     " window");
  }
  const auto la = luma_plane(a);
  const auto lb = luma_plane(b);
  std::vector<double> aa(la.size()), bb(la.size()), ab(la.size());
  for (std::size_t i = 0; i < la.size(); ++i) {
    aa[i] = la[i] * la[i];
    bb[i] = lb[i] * lb[i];
    ab[i] = la[i] * lb[i];
  }
  const auto k = gaussian_window(o.window, o.sigma);
  const int h = a.height;
  const int w = a.width;
  const auto mu_a = filter_valid(la, h, w, k);
  const auto mu_b = filter_valid(lb, h, w, k);
  const auto e_aa = filter_valid(aa, h, w, k);
  const auto e_bb = filter_valid(bb, h, w, k);
  const auto e_ab = filter_valid(ab, h, w, k);

  const double c1 = (o.k1 * o.dynamic_range) * (o.k1 * o.dynamic_range);
  const double c2 = (o.k2 * o.dynamic_range) * (o.k2 * o.dynamic_range);
  double sum = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double va = e_aa[i] - ma * ma;
    const double vb = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    sum += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return sum / static_cast<double>(mu_a.size());
}

CciRecord cci(const Image8& img, CciForm form) {
  if (img.channels != 3) throw ShapeError("cci: expected a 3-channel image");
  if (img.data.empty()) throw ShapeError("cci: empty image");
  using Planes = Eigen::Array<std::uint8_t, 3, Eigen::Dynamic>;
  const Eigen::Map<const Planes> px(img.data.data(), 3, static_cast<Eigen::Index>(img.pixel_count()));
  const Eigen::Array<double, 3, Eigen::Dynamic> rgb = px.cast<double>();

  double value = 0.0;
  if (form == CciForm::Hasler) {
    const Eigen::ArrayXd rg = (rgb.row(0) - rgb.row(1)).transpose();
    const Eigen::ArrayXd yb = (0.5 * (rgb.row(0) + rgb.row(1)) - rgb.row(2)).transpose();
    const double sd_rg = population_std(rg);
    const double sd_yb = population_std(yb);
    const double mu_rg = rg.mean();
    const double mu_yb = yb.mean();
    value = std::sqrt(sd_rg * sd_rg + sd_yb * sd_yb) + 0.3 * std::sqrt(mu_rg * mu_rg + mu_yb * mu_yb);
  } else {
    const Eigen::ArrayXd mx = rgb.colwise().maxCoeff().transpose();
    const Eigen::ArrayXd mn = rgb.colwise().minCoeff().transpose();
    const Eigen::ArrayXd sat = (mx > 0.0).select(100.0 * (mx - mn) / mx.max(1.0), 0.0);
    value = sat.mean() + population_std(sat);
  }
  return {value, in_cci_optimum(value)};
}

Fraction cci_ratio(std::span<const CciRecord> records) {
  if (records.empty()) throw Error("cci_ratio: empty image set");
  const auto hits = static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const CciRecord& r) { return r.in_optimum; }));
  return {hits, records.size()};
}

Fraction cci_ratio(std::span<const Image8> images, CciForm form) {
  std::vector<CciRecord> records;
  records.reserve(images.size());
  for (const auto& img : images) records.push_back(cci(img, form));
  return cci_ratio(std::span<const CciRecord>(records));
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("quantile: empty input");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw Error("box_stats: empty input");
  std::sort(values.begin(), values.end());
  BoxStats s;
  s.q1 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q3 = quantile(values, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_low = *std::find_if(values.begin(), values.end(), [&](double v) { return v >= lo_fence; });
  s.whisker_high = *std::find_if(values.rbegin(), values.rend(), [&](double v) { return v <= hi_fence; });
  return s;
}

MetricsReport build_report(std::vector<MetricsRow> rows) {
  if (rows.empty()) throw Error("metrics report: no images");
  MetricsReport r;
  std::vector<double> ccis;
  std::vector<CciRecord> records;
  double psnr_sum = 0.0, ssim_sum = 0.0, cci_sum = 0.0;
  for (const auto& row : rows) {
    psnr_sum += row.psnr_db;
    ssim_sum += row.ssim;
    cci_sum += row.cci;
    ccis.push_back(row.cci);
    records.push_back({row.cci, row.in_optimum});
  }
  const auto n = static_cast<double>(rows.size());
  r.mean_psnr = psnr_sum / n;
  r.mean_ssim = ssim_sum / n;
  r.mean_cci = cci_sum / n;
  r.cci_ratio = cci_ratio(std::span<const CciRecord>(records));
  r.cci_box = box_stats(ccis);
  r.rows = std::move(rows);
  return r;
}

MetricsReport evaluate_pairs(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir) {
  const auto preds = images_by_stem(pred_dir);
  const auto gts = images_by_stem(gt_dir);
  std::vector<std::string> unmatched;
  for (const auto& [stem, path] : preds) {
    if (!gts.contains(stem)) unmatched.push_back(path.string());
  }
  for (const auto& [stem, path] : gts) {
    if (!preds.contains(stem)) unmatched.push_back(path.string());
  }
  if (!unmatched.empty()) {
    std::string msg = "unmatched files:";
    for (const auto& u : unmatched) msg += " " + u;
    throw IoError(msg);
  }
  if (preds.empty()) throw IoError("no images found in " + pred_dir.string() + " and " + gt_dir.string());

  std::vector<MetricsRow> rows;
  for (const auto& [stem, pred_path] : preds) {
    const Image8 pred = gray_to_rgb(read_image(pred_path));
    const Image8 gt = gray_to_rgb(read_image(gts.at(stem)));
    MetricsRow row;
    row.file = pred_path.filename().string();
    row.psnr_db = psnr(pred, gt);
    row.ssim = ssim(pred, gt);
    const auto rec = cci(pred);
    row.cci = rec.cci;
    row.in_optimum = rec.in_optimum;
    rows.push_back(std::move(row));
  }
  return build_report(std::move(rows));
}

void write_report(const MetricsReport& report, const std::filesystem::path& prefix) {
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
  const auto csv_path = std::filesystem::path(prefix.string() + ".csv");
  const auto json_path = std::filesystem::path(prefix.string() + ".json");

  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw IoError("cannot write " + csv_path.string());
  csv << "file,psnr_db,ssim,cci,in_optimum\n";
  for (const auto& r : report.rows) {
    csv << r.file << ',' << format_number(r.psnr_db) << ',' << format_number(r.ssim) << ','
        << format_number(r.cci) << ',' << (r.in_optimum ? 1 : 0) << '\n';
  }

  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    j["rows"].push_back({{"file", r.file},
                         {"psnr_db", json_number(r.psnr_db)},
                         {"ssim", r.ssim},
                         {"cci", r.cci},
                         {"in_optimum", r.in_optimum}});
  }
  j["aggregates"] = {
      {"mean_psnr", json_number(report.mean_psnr)},
      {"mean_ssim", report.mean_ssim},
      {"mean_cci", report.mean_cci},
      {"cci_ratio", report.cci_ratio.value()},
      {"cci_ratio_count", {report.cci_ratio.numerator, report.cci_ratio.denominator}},
      {"cci_quartiles", {report.cci_box.q1, report.cci_box.median, report.cci_box.q3}},
      {"whiskers", {report.cci_box.whisker_low, report.cci_box.whisker_high}},
  };
  j["metadata"] = {{"ssim_channel", "luma (BT.601)"},
                   {"ssim_window", 11},
                   {"ssim_sigma", 1.5},
                   {"cci_form", "hasler"},
                   {"cci_optimum", {kCciOptimumLow, kCciOptimumHigh}},
                   {"psnr_infinite_sentinel", "inf"}};
  std::ofstream js(json_path, std::ios::trunc);
  if (!js) throw IoError("cannot write " + json_path.string());
  js << j.dump(2) << '\n';
}

}  // namespace scgan
