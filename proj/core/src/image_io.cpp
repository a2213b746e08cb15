#include "scgan/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <string>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "scgan/error.hpp"

namespace scgan {

namespace {

cv::Mat to_mat(const Image8& img) {
  cv::Mat m(img.height, img.width, img.channels == 3 ? CV_8UC3 : CV_8UC1);
  std::memcpy(m.data, img.data.data(), img.data.size());
  return m;
}

Image8 from_mat(const cv::Mat& m) {
  const cv::Mat cont = m.isContinuous() ? m : m.clone();
  Image8 img(cont.rows, cont.cols, cont.channels());
  std::memcpy(img.data.data(), cont.data, img.data.size());
  return img;
}

}  // namespace

bool is_image_file(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::map<std::string, std::filesystem::path> images_by_stem(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::map<std::string, std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file() || !is_image_file(e.path())) continue;
    const auto stem = e.path().stem().string();
    auto [it, inserted] = out.emplace(stem, e.path());
    if (!inserted) {
      throw IoError("ambiguous basename '" + stem + "' in " + dir.string() + ": " +
                    it->second.filename().string() + " and " + e.path().filename().string());
    }
  }
  return out;
}

Image8 read_image(const std::filesystem::path& path) {
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) throw IoError("cannot decode image: " + path.string());
  if (raw.depth() != CV_8U) {
    throw IoError("unsupported bit depth (8-bit only): " + path.string());
  }
  cv::Mat rgb;
  switch (raw.channels()) {
    case 1:
      return from_mat(raw);
    case 3:
      cv::cvtColor(raw, rgb, cv::COLOR_BGR2RGB);
      break;
    case 4:
      cv::cvtColor(raw, rgb, cv::COLOR_BGRA2RGB);
      break;
    default:
      throw IoError("unsupported channel count in " + path.string());
  }
  return from_mat(rgb);
}

Image8 read_gray_image(const std::filesystem::path& path) {
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (raw.empty()) throw IoError("cannot decode image: " + path.string());
  return from_mat(raw);
}

void write_image(const std::filesystem::path& path, const Image8& img) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  cv::Mat m = to_mat(img);
  if (img.channels == 3) cv::cvtColor(m, m, cv::COLOR_RGB2BGR);
  if (!cv::imwrite(path.string(), m)) throw IoError("cannot write image: " + path.string());
}

Image8 resize_bilinear(const Image8& img, int height, int width) {
  if (height <= 0 || width <= 0) throw ShapeError("resize_bilinear: non-positive target size");
  if (img.height == height && img.width == width) return img;
  cv::Mat out;
  cv::resize(to_mat(img), out, cv::Size(width, height), 0.0, 0.0, cv::INTER_LINEAR);
  return from_mat(out);
}

}  // namespace scgan
