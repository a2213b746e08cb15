#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "scgan/image.hpp"

namespace scgan {

struct DatasetEntry {
  std::filesystem::path color;
  std::filesystem::path saliency;
  std::string id;  // shared basename without extension
};

struct DatasetIndex {
  std::vector<DatasetEntry> entries;       // sorted by id
  std::vector<std::filesystem::path> excluded_gray;  // colour files with R = G = B everywhere
  std::string split;
};

/// Pairs colour images with saliency maps by basename (extension-insensitive).
/// Throws IoError listing every colour file without a saliency partner.
DatasetIndex build_index(const std::filesystem::path& color_dir, const std::filesystem::path& saliency_dir,
                         const std::string& split = "train");

/// One training triple: grayscale input x [1,S,S] and colour c [3,S,S] in
/// [-1, 1], saliency s [1,S,S] in [0, 1].
struct TrainingSample {
  torch::Tensor x;
  torch::Tensor c;
  torch::Tensor s;
  std::string id;
};

/// Builds a sample from decoded images: bilinear resize to size x size,
/// grayscale via BT.601 luma of the resized colour image.
TrainingSample make_sample(const Image8& color, const Image8& saliency, int size, std::string id);

TrainingSample load_sample(const DatasetEntry& entry, int target_size = 256);

/// Random-access sample provider for the training loop.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  [[nodiscard]] virtual std::size_t size() const = 0;
  [[nodiscard]] virtual TrainingSample get(std::size_t i) const = 0;
};

class InMemorySource : public SampleSource {
 public:
  explicit InMemorySource(std::vector<TrainingSample> samples) : samples_(std::move(samples)) {}
  [[nodiscard]] std::size_t size() const override { return samples_.size(); }
  [[nodiscard]] TrainingSample get(std::size_t i) const override { return samples_.at(i); }

 private:
  std::vector<TrainingSample> samples_;
};

/// Decodes entries lazily from disk.
class IndexSource : public SampleSource {
 public:
  IndexSource(DatasetIndex index, int target_size) : index_(std::move(index)), size_(target_size) {}
  [[nodiscard]] std::size_t size() const override { return index_.entries.size(); }
  [[nodiscard]] TrainingSample get(std::size_t i) const override { return load_sample(index_.entries.at(i), size_); }

 private:
  DatasetIndex index_;
  int size_;
};

struct Batch {
  torch::Tensor x;  // [B,1,S,S]
  torch::Tensor c;  // [B,3,S,S]
  torch::Tensor s;  // [B,1,S,S]
};

Batch collate(const SampleSource& source, const std::vector<std::int64_t>& indices);

struct ToySample {
  Image8 color;
  Image8 saliency;  // binary: 0 or 255
  std::string id;
};

/// Coloured geometric shapes on dark or bright achromatic backgrounds with
/// exact binary saliency masks over the shapes. Shape luma differs from the
/// background by at least 40 levels. Deterministic per seed. Size must be a
/// positive multiple of 32.
std::vector<ToySample> make_toy_images(int n, int size, std::uint64_t seed);

/// Writes `<dir>/color/<id>.png` and `<dir>/saliency/<id>.png`.
void write_toy_dataset(const std::vector<ToySample>& samples, const std::filesystem::path& dir);

std::vector<TrainingSample> to_training_samples(const std::vector<ToySample>& samples);

}  // namespace scgan
