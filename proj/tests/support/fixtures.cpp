#include "fixtures.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mini_png.hpp"

namespace testing_support {

dehaze::ImageBuffer random_image(std::mt19937_64& rng, int width, int height, int channels, double lo,
                                 double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> s(static_cast<std::size_t>(width) * height * channels);
  for (double& v : s) v = dist(rng);
  return dehaze::ImageBuffer(width, height, channels, std::move(s));
}

dehaze::ImageBuffer distinct_image(int width, int height, int channels) {
  const std::size_t n = static_cast<std::size_t>(width) * height * channels;
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<double>(i + 1) / static_cast<double>(n + 1);
  return dehaze::ImageBuffer(width, height, channels, std::move(s));
}

ScratchDir::ScratchDir(const std::string& tag) {
  std::string pattern = (std::filesystem::temp_directory_path() / ("dehaze-" + tag + "-XXXXXX")).string();
  if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_rgb8(const std::filesystem::path& path, int width, int height,
                const std::vector<std::uint16_t>& interleaved) {
  testpng::Raw raw;
  raw.width = width;
  raw.height = height;
  raw.color_type = 2;
  raw.bit_depth = 8;
  raw.samples = interleaved;
  testpng::write_file(path, testpng::encode(raw));
}

std::vector<std::string> write_synthetic_dataset(const std::filesystem::path& root, int per_level,
                                                 std::uint64_t seed, int width, int height) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::string> names;
  int k = 0;
  for (int level = 1; level <= 5; ++level) {
    for (int i = 0; i < per_level; ++i, ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "scene_%02d_L%d", k, level);
      const auto dir = root / name;
      std::filesystem::create_directories(dir);

      // Smooth ground truth plus haze that grows with the level.
      const double fx = 0.1 + 0.3 * unit(rng);
      const double fy = 0.1 + 0.3 * unit(rng);
      const double haze = 0.12 * level;
      std::vector<std::uint16_t> gt, hazy;
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          for (int c = 0; c < 3; ++c) {
            const double g = 0.5 + 0.4 * std::sin(fx * x + fy * y + 1.3 * c);
            const double h = std::clamp((1.0 - haze) * g + haze * 0.8 + 0.02 * (unit(rng) - 0.5), 0.0, 1.0);
            gt.push_back(static_cast<std::uint16_t>(std::lround(g * 255.0)));
            hazy.push_back(static_cast<std::uint16_t>(std::lround(h * 255.0)));
          }
        }
      }
      write_rgb8(dir / "img_0.png", width, height, hazy);
      write_rgb8(dir / "img_1.png", width, height, gt);
      names.emplace_back(name);
    }
  }
  return names;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace testing_support
