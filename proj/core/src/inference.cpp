#include "scgan/inference.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "scgan/error.hpp"
#include "scgan/image_io.hpp"
#include "scgan/tensor_bridge.hpp"
#include "scgan/weights.hpp"

namespace scgan {

namespace fs = std::filesystem;

LoadedGenerator load_generator_checkpoint(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("no checkpoint manifest in " + dir.string());
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("corrupt checkpoint manifest in " + dir.string() + ": " + e.what());
  }
  if (!m.contains("config")) throw IoError("checkpoint manifest has no config snapshot: " + dir.string());
  LoadedGenerator out;
  out.config = run_config_from_json(m.at("config"));
  out.generator = Generator(out.config.effective_generator());
  load_module(dir / "generator.json", *out.generator);
  out.generator->eval();
  return out;
}

int nearest_multiple(int value, int step) {
  if (value < 1 || step < 1) throw ShapeError("nearest_multiple: arguments must be positive");
  const int down = (value / step) * step;
  const int up = down + step;
  if (down == 0) return step;
  return (value - down < up - value) ? down : up;
}

Colorization colorize(Generator& generator, const Image8& input) {
  if (input.channels != 1 && input.channels != 3) {
    throw ShapeError("colorize: expected 1 or 3 channels, got " + std::to_string(input.channels));
  }
  const Image8 gray = input.channels == 3 ? rgb_to_gray(input) : input;
  const int stride = 1 << generator->config().encoder_depth;
  const int h = nearest_multiple(gray.height, stride);
  const int w = nearest_multiple(gray.width, stride);
  Colorization out;
  out.resized = h != gray.height || w != gray.width;
  const Image8 net_in = out.resized ? resize_bilinear(gray, h, w) : gray;

  generator->eval();
  GeneratorOutput pred;
  {
    torch::NoGradGuard no_grad;
    pred = generator->forward_any_size(to_tensor(normalize(net_in)).unsqueeze(0));
  }
  Image8 color = denormalize(net_image_from_tensor(pred.color));
  Image8 sal = saliency_to_image(saliency_from_tensor(pred.saliency));
  if (out.resized) {
    color = resize_bilinear(color, gray.height, gray.width);
    sal = resize_bilinear(sal, gray.height, gray.width);
  }
  out.weighted = Image8(color.height, color.width, 3);
  for (std::size_t p = 0; p < color.pixel_count(); ++p) {
    const double s = sal.data[p] / 255.0;
    for (int ch = 0; ch < 3; ++ch) {
      out.weighted.data[p * 3 + ch] = static_cast<std::uint8_t>(std::lround(color.data[p * 3 + ch] * s));
    }
  }
  out.color = std::move(color);
  out.saliency = std::move(sal);
  return out;
}

}  // namespace scgan
