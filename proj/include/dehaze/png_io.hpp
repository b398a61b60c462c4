#pragma once

#include <filesystem>

#include "dehaze/image.hpp"

namespace dehaze {

// Accepts 1/2/4/8/16-bit grayscale and 8/16-bit RGB; alpha is dropped and
// palette images are rejected. Failures throw PngError with a distinct kind.
ImageBuffer load_png(const std::filesystem::path& path);

// Always writes 8-bit gray or RGB, quantized with quantize_sample().
void save_png(const ImageBuffer& img, const std::filesystem::path& path);

}  // namespace dehaze
