#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <torch/torch.h>

namespace scgan {

/// Named arrays keyed by their dotted module path (e.g. "down1.conv.weight").
using NamedTensors = std::map<std::string, torch::Tensor>;

/// Weight manifest on disk: `<stem>.json` indexes arrays stored back to back
/// in `<stem>.bin`.
///
///   { "format": "scgan-weights/1", "data": "<stem>.bin",
///     "arrays": { "<name>": { "shape": [..], "dtype": "float32",
///                             "offset": <bytes>, "nbytes": <bytes> } } }
///
/// Supported dtypes: float32, float64, int64. Raw data is little-endian.
void save_weight_manifest(const std::filesystem::path& index_path, const NamedTensors& arrays);

/// Throws scgan::IoError on unreadable or inconsistent manifests.
NamedTensors load_weight_manifest(const std::filesystem::path& index_path);

/// Parameters and buffers of a module, keyed by their recursive names.
NamedTensors module_state(const torch::nn::Module& module);

/// Copies arrays into the module's parameters and buffers. Every module entry
/// must be present with a matching shape; mismatches throw with the entry name.
/// Extra manifest entries are rejected when `strict` is set.
void load_module_state(torch::nn::Module& module, const NamedTensors& arrays, bool strict = true);

inline void save_module(const std::filesystem::path& index_path, const torch::nn::Module& module) {
  save_weight_manifest(index_path, module_state(module));
}

inline void load_module(const std::filesystem::path& index_path, torch::nn::Module& module) {
  load_module_state(module, load_weight_manifest(index_path));
}

/// FNV-1a over the raw bytes of every array, in name order. Used to check that
/// an update touched (or did not touch) a parameter set.
std::uint64_t checksum(const NamedTensors& arrays);

}  // namespace scgan
