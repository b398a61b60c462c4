#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "dehaze/image.hpp"

namespace testing_support {

dehaze::ImageBuffer random_image(std::mt19937_64& rng, int width, int height, int channels,
                                 double lo = 0.0, double hi = 1.0);

/// Image whose samples are all distinct (k / (n+1) in storage order).
dehaze::ImageBuffer distinct_image(int width, int height, int channels);

/// Unique scratch directory removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag = "test");
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Writes an 8-bit RGB PNG with the test-only encoder.
void write_rgb8(const std::filesystem::path& path, int width, int height,
                const std::vector<std::uint16_t>& interleaved);

/// Scene tree in the img_0/img_1 layout. Scene k is named
/// `scene_{k:02}_L{level}` with levels cycling 1..5, `per_level` scenes each.
/// Images are width x height (deliberately not multiples of 8 by default).
std::vector<std::string> write_synthetic_dataset(const std::filesystem::path& root, int per_level,
                                                 std::uint64_t seed, int width = 45, int height = 37);

std::string read_text(const std::filesystem::path& path);

}  // namespace testing_support
