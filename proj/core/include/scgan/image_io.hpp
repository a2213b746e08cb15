#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "scgan/image.hpp"

namespace scgan {

/// Decodes a PNG/JPEG file. Gray files stay single-channel, colour files
/// become RGB, alpha is dropped.
Image8 read_image(const std::filesystem::path& path);

/// Decodes a saliency map as a single-channel 8-bit image.
Image8 read_gray_image(const std::filesystem::path& path);

/// Encodes by extension (.png, .jpg, .jpeg). Parent directories are created.
void write_image(const std::filesystem::path& path, const Image8& img);

Image8 resize_bilinear(const Image8& img, int height, int width);

/// True for the extensions the reader accepts (case-insensitive).
bool is_image_file(const std::filesystem::path& path);

/// Image files directly inside `dir`, keyed by basename without extension.
/// Throws IoError if `dir` is not a directory or two files share a basename.
std::map<std::string, std::filesystem::path> images_by_stem(const std::filesystem::path& dir);

}  // namespace scgan
