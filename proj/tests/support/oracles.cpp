#include "oracles.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace scgan::oracle {

double cci_scalar(const Image8& img) {
  const std::size_t n = static_cast<std::size_t>(img.height) * img.width;
  double sum_rg = 0.0, sum_yb = 0.0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double r = img.at(y, x, 0), g = img.at(y, x, 1), b = img.at(y, x, 2);
      sum_rg += r - g;
      sum_yb += 0.5 * (r + g) - b;
    }
  }
  const double mean_rg = sum_rg / n, mean_yb = sum_yb / n;
  double ss_rg = 0.0, ss_yb = 0.0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double r = img.at(y, x, 0), g = img.at(y, x, 1), b = img.at(y, x, 2);
      const double drg = (r - g) - mean_rg;
      const double dyb = (0.5 * (r + g) - b) - mean_yb;
      ss_rg += drg * drg;
      ss_yb += dyb * dyb;
    }
  }
  const double sigma = std::sqrt(ss_rg / n + ss_yb / n);
  const double mu = std::sqrt(mean_rg * mean_rg + mean_yb * mean_yb);
  return sigma + 0.3 * mu;
}

bool cci_in_optimum(const Image8& img) {
  const double v = cci_scalar(img);
  return v >= 16.0 && v <= 20.0;
}

namespace {

std::vector<double> luma(const Image8& img) {
  std::vector<double> out(static_cast<std::size_t>(img.height) * img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double v;
      if (img.channels == 1) {
        v = img.at(y, x, 0);
      } else {
        v = 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) + 0.114 * img.at(y, x, 2);
      }
      out[static_cast<std::size_t>(y) * img.width + x] = v;
    }
  }
  return out;
}

}  // namespace

double ssim_windowed(const Image8& a, const Image8& b, int window, double sigma) {
  const auto la = luma(a);
  const auto lb = luma(b);
  const int h = a.height, w = a.width;
  std::vector<double> kernel(static_cast<std::size_t>(window) * window);
  const double c = (window - 1) / 2.0;
  double total = 0.0;
  for (int i = 0; i < window; ++i) {
    for (int j = 0; j < window; ++j) {
      const double d2 = (i - c) * (i - c) + (j - c) * (j - c);
      kernel[i * window + j] = std::exp(-d2 / (2 * sigma * sigma));
      total += kernel[i * window + j];
    }
  }
  for (auto& k : kernel) k /= total;

  const double c1 = std::pow(0.01 * 255.0, 2), c2 = std::pow(0.03 * 255.0, 2);
  double acc = 0.0;
  int count = 0;
  for (int y0 = 0; y0 + window <= h; ++y0) {
    for (int x0 = 0; x0 + window <= w; ++x0) {
      double ma = 0, mb = 0;
      for (int i = 0; i < window; ++i) {
        for (int j = 0; j < window; ++j) {
          const double k = kernel[i * window + j];
          ma += k * la[(y0 + i) * w + x0 + j];
          mb += k * lb[(y0 + i) * w + x0 + j];
        }
      }
      double va = 0, vb = 0, cov = 0;
      for (int i = 0; i < window; ++i) {
        for (int j = 0; j < window; ++j) {
          const double k = kernel[i * window + j];
          const double da = la[(y0 + i) * w + x0 + j] - ma;
          const double db = lb[(y0 + i) * w + x0 + j] - mb;
          va += k * da * da;
          vb += k * db * db;
          cov += k * da * db;
        }
      }
      acc += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  }
  return acc / count;
}

double ssim_constant(double a, double b, double k1, double k2, double range) {
  const double c1 = (k1 * range) * (k1 * range);
  const double c2 = (k2 * range) * (k2 * range);
  return ((2 * a * b + c1) * c2) / ((a * a + b * b + c1) * c2);
}

torch::Tensor conv2d_loops(const torch::Tensor& input, const torch::Tensor& weight, const torch::Tensor& bias,
                           int stride, int padding) {
  const auto x = input.to(torch::kDouble).contiguous();
  const auto w = weight.to(torch::kDouble).contiguous();
  const auto n = x.size(0), cin = x.size(1), h = x.size(2), wd = x.size(3);
  const auto cout = w.size(0), kh = w.size(2), kw = w.size(3);
  const auto oh = (h + 2 * padding - kh) / stride + 1;
  const auto ow = (wd + 2 * padding - kw) / stride + 1;
  auto out = torch::zeros({n, cout, oh, ow}, torch::kDouble);
  auto xa = x.accessor<double, 4>();
  auto wa = w.accessor<double, 4>();
  auto oa = out.accessor<double, 4>();
  for (int64_t b = 0; b < n; ++b) {
    for (int64_t o = 0; o < cout; ++o) {
      const double bo = bias.defined() ? bias[o].item<double>() : 0.0;
      for (int64_t y = 0; y < oh; ++y) {
        for (int64_t xo = 0; xo < ow; ++xo) {
          double acc = bo;
          for (int64_t ci = 0; ci < cin; ++ci) {
            for (int64_t i = 0; i < kh; ++i) {
              for (int64_t j = 0; j < kw; ++j) {
                const int64_t iy = y * stride + i - padding;
                const int64_t ix = xo * stride + j - padding;
                if (iy < 0 || ix < 0 || iy >= h || ix >= wd) continue;
                acc += xa[b][ci][iy][ix] * wa[o][ci][i][j];
              }
            }
          }
          oa[b][o][y][xo] = acc;
        }
      }
    }
  }
  return out;
}

torch::Tensor maxpool2_loops(const torch::Tensor& input) {
  const auto x = input.to(torch::kDouble).contiguous();
  const auto n = x.size(0), c = x.size(1), h = x.size(2) / 2, w = x.size(3) / 2;
  auto out = torch::empty({n, c, h, w}, torch::kDouble);
  auto xa = x.accessor<double, 4>();
  auto oa = out.accessor<double, 4>();
  for (int64_t b = 0; b < n; ++b)
    for (int64_t ch = 0; ch < c; ++ch)
      for (int64_t y = 0; y < h; ++y)
        for (int64_t xo = 0; xo < w; ++xo) {
          double m = xa[b][ch][2 * y][2 * xo];
          m = std::max(m, xa[b][ch][2 * y][2 * xo + 1]);
          m = std::max(m, xa[b][ch][2 * y + 1][2 * xo]);
          m = std::max(m, xa[b][ch][2 * y + 1][2 * xo + 1]);
          oa[b][ch][y][xo] = m;
        }
  return out;
}

torch::Tensor weighted_product_loops(const torch::Tensor& color, const torch::Tensor& saliency) {
  const auto c = color.to(torch::kDouble).contiguous();
  const auto s = saliency.to(torch::kDouble).contiguous();
  auto out = torch::empty_like(c);
  auto ca = c.accessor<double, 4>();
  auto sa = s.accessor<double, 4>();
  auto oa = out.accessor<double, 4>();
  for (int64_t b = 0; b < c.size(0); ++b)
    for (int64_t ch = 0; ch < c.size(1); ++ch)
      for (int64_t y = 0; y < c.size(2); ++y)
        for (int64_t x = 0; x < c.size(3); ++x) oa[b][ch][y][x] = ca[b][ch][y][x] * sa[b][0][y][x];
  return out;
}

double top_singular_value(const torch::Tensor& weight) {
  const auto w = weight.detach().to(torch::kDouble).reshape({weight.size(0), -1}).contiguous();
  Eigen::MatrixXd m(w.size(0), w.size(1));
  auto a = w.accessor<double, 2>();
  for (int64_t i = 0; i < w.size(0); ++i)
    for (int64_t j = 0; j < w.size(1); ++j) m(i, j) = a[i][j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double central_difference(const std::function<double()>& f, torch::Tensor& param, std::int64_t flat_index,
                          double h) {
  torch::NoGradGuard no_grad;
  auto flat = param.view({-1});
  const double orig = flat[flat_index].item<double>();
  flat[flat_index].fill_(orig + h);
  const double plus = f();
  flat[flat_index].fill_(orig - h);
  const double minus = f();
  flat[flat_index].fill_(orig);
  return (plus - minus) / (2 * h);
}

Image8 random_image(int h, int w, int c, std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  Image8 img(h, w, c);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(dist(rng));
  return img;
}

}  // namespace scgan::oracle
