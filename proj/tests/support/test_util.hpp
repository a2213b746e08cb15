#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <unistd.h>

#include "scgan/config.hpp"
#include "scgan/dataset.hpp"

namespace scgan::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "scgan") {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  [[nodiscard]] std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

/// Smallest useful training setup: 32-pixel inputs, quarter-width networks,
/// batch 4, two epochs per stage.
inline RunConfig tiny_config(const std::filesystem::path& out_dir) {
  RunConfig c = toy_run_config();
  c.generator.input_size = 32;
  c.train.batch_size = 4;
  c.train.stage1_epochs = 2;
  c.train.stage2_epochs = 2;
  c.output_dir = out_dir.string();
  return c;
}

inline InMemorySource toy_source(int n, int size, std::uint64_t seed = 7) {
  return InMemorySource(to_training_samples(make_toy_images(n, size, seed)));
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace scgan::testing
