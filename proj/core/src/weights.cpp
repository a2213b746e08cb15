#include "scgan/weights.hpp"

#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "scgan/error.hpp"

namespace scgan {

namespace {

constexpr const char* kFormat = "scgan-weights/1";

std::string dtype_name(torch::ScalarType t) {
  switch (t) {
    case torch::kFloat32:
      return "float32";
    case torch::kFloat64:
      return "float64";
    case torch::kInt64:
      return "int64";
    default:
      throw Error(std::string("weight manifest: unsupported dtype ") + c10::toString(t));
  }
}

torch::ScalarType dtype_from_name(const std::string& name, const std::string& entry) {
  if (name == "float32") return torch::kFloat32;
  if (name == "float64") return torch::kFloat64;
  if (name == "int64") return torch::kInt64;
  throw IoError("weight manifest: entry '" + entry + "' has unknown dtype '" + name + "'");
}

std::filesystem::path data_path_for(const std::filesystem::path& index_path) {
  auto p = index_path;
  p.replace_extension(".bin");
  return p;
}

}  // namespace

void save_weight_manifest(const std::filesystem::path& index_path, const NamedTensors& arrays) {
  if (index_path.has_parent_path()) std::filesystem::create_directories(index_path.parent_path());
  const auto data_path = data_path_for(index_path);
  std::ofstream bin(data_path, std::ios::binary | std::ios::trunc);
  if (!bin) throw IoError("cannot write " + data_path.string());

  nlohmann::json index;
  index["format"] = kFormat;
  index["data"] = data_path.filename().string();
  nlohmann::json entries = nlohmann::json::object();
  std::uint64_t offset = 0;
  for (const auto& [name, tensor] : arrays) {
    const auto t = tensor.detach().to(torch::kCPU).contiguous();
    const auto nbytes = static_cast<std::uint64_t>(t.numel()) * t.element_size();
    bin.write(static_cast<const char*>(t.data_ptr()), static_cast<std::streamsize>(nbytes));
    entries[name] = {{"shape", t.sizes().vec()},
                     {"dtype", dtype_name(t.scalar_type())},
                     {"offset", offset},
                     {"nbytes", nbytes}};
    offset += nbytes;
  }
  index["arrays"] = std::move(entries);
  if (!bin) throw IoError("short write to " + data_path.string());

  std::ofstream js(index_path, std::ios::trunc);
  if (!js) throw IoError("cannot write " + index_path.string());
  js << index.dump(2) << '\n';
}

NamedTensors load_weight_manifest(const std::filesystem::path& index_path) {
  std::ifstream js(index_path);
  if (!js) throw IoError("cannot open weight manifest " + index_path.string());
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(js);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("corrupt weight manifest " + index_path.string() + ": " + e.what());
  }
  if (!index.is_object() || index.value("format", "") != kFormat || !index.contains("arrays")) {
    throw IoError("corrupt weight manifest " + index_path.string() + ": missing format header");
  }
  const auto data_path = index_path.parent_path() / index.at("data").get<std::string>();
  std::ifstream bin(data_path, std::ios::binary);
  if (!bin) throw IoError("cannot open weight data " + data_path.string());
  bin.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::uint64_t>(bin.tellg());

  NamedTensors out;
  for (const auto& [name, entry] : index.at("arrays").items()) {
    try {
      const auto shape = entry.at("shape").get<std::vector<std::int64_t>>();
      const auto dtype = dtype_from_name(entry.at("dtype").get<std::string>(), name);
      const auto offset = entry.at("offset").get<std::uint64_t>();
      const auto nbytes = entry.at("nbytes").get<std::uint64_t>();
      auto t = torch::empty(shape, torch::TensorOptions().dtype(dtype));
      if (static_cast<std::uint64_t>(t.numel()) * t.element_size() != nbytes ||
          offset + nbytes > file_size) {
        throw IoError("corrupt weight manifest: entry '" + name + "' has inconsistent size");
      }
      bin.seekg(static_cast<std::streamoff>(offset));
      bin.read(static_cast<char*>(t.data_ptr()), static_cast<std::streamsize>(nbytes));
      if (!bin) throw IoError("corrupt weight manifest: short read for entry '" + name + "'");
      out.emplace(name, std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("corrupt weight manifest: entry '" + name + "': " + e.what());
    }
  }
  return out;
}

NamedTensors module_state(const torch::nn::Module& module) {
  NamedTensors out;
  for (const auto& item : module.named_parameters(true)) out.emplace(item.key(), item.value());
  for (const auto& item : module.named_buffers(true)) out.emplace(item.key(), item.value());
  return out;
}

void load_module_state(torch::nn::Module& module, const NamedTensors& arrays, bool strict) {
  torch::NoGradGuard no_grad;
  std::size_t used = 0;
  auto assign = [&](const std::string& name, torch::Tensor& target) {
    const auto it = arrays.find(name);
    if (it == arrays.end()) throw ShapeError("weights: missing entry for layer '" + name + "'");
    if (it->second.sizes() != target.sizes()) {
      throw ShapeError(c10::str("weights: shape mismatch for layer '", name, "': expected ",
                                target.sizes(), ", manifest has ", it->second.sizes()));
    }
    target.copy_(it->second);
    ++used;
  };
  for (auto& item : module.named_parameters(true)) assign(item.key(), item.value());
  for (auto& item : module.named_buffers(true)) assign(item.key(), item.value());
  if (strict && used != arrays.size()) {
    for (const auto& [name, _] : arrays) {
      if (!module.named_parameters(true).contains(name) && !module.named_buffers(true).contains(name)) {
        throw ShapeError("weights: unexpected entry '" + name + "' in manifest");
      }
    }
  }
}

std::uint64_t checksum(const NamedTensors& arrays) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& [name, tensor] : arrays) {
    for (unsigned char ch : name) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    const auto t = tensor.detach().to(torch::kCPU).contiguous();
    const auto* bytes = static_cast<const unsigned char*>(t.data_ptr());
    const auto n = static_cast<std::size_t>(t.numel()) * t.element_size();
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace scgan
