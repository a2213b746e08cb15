#pragma once

#include <filesystem>

#include "scgan/config.hpp"
#include "scgan/generator.hpp"
#include "scgan/image.hpp"

namespace scgan {

/// Generator rebuilt from the config snapshot and weights of a checkpoint
/// directory, in eval mode.
struct LoadedGenerator {
  RunConfig config;
  Generator generator{nullptr};
};

LoadedGenerator load_generator_checkpoint(const std::filesystem::path& checkpoint_dir);

struct Colorization {
  Image8 color;     // 3 channels, input resolution
  Image8 saliency;  // 1 channel, input resolution
  /// RGB scaled by saliency per pixel (the attention-region view).
  Image8 weighted;
  /// True when the input had to be resized to a multiple of 32.
  bool resized = false;
};

/// Nearest positive multiple of `step` (ties round up).
int nearest_multiple(int value, int step);

/// Colorizes one image. Colour inputs are converted to gray first. Sizes that
/// are not multiples of the network stride are resized there and back.
/// No noise is added.
Colorization colorize(Generator& generator, const Image8& input);

}  // namespace scgan
