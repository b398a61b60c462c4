#include "dehaze/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dehaze/errors.hpp"

namespace dehaze {

namespace {

void check_shape(int width, int height, int channels, std::size_t count) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("image dimensions must be positive, got " + std::to_string(width) +
                                "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw std::invalid_argument("image must have 1 or 3 channels, got " + std::to_string(channels));
  }
  const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                               static_cast<std::size_t>(channels);
  if (count != expected) {
    throw std::invalid_argument("sample count " + std::to_string(count) + " does not match " +
                                std::to_string(width) + "x" + std::to_string(height) + "x" +
                                std::to_string(channels));
  }
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<double> samples)
    : width_(width), height_(height), channels_(channels), samples_(std::move(samples)) {
  check_shape(width, height, channels, samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const double s = samples_[i];
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw std::invalid_argument("sample " + std::to_string(i) + " outside [0,1]: " +
                                  std::to_string(s));
    }
  }
}

ImageBuffer ImageBuffer::filled(int width, int height, int channels, double value) {
  const std::size_t n = static_cast<std::size_t>(std::max(width, 0)) *
                        static_cast<std::size_t>(std::max(height, 0)) *
                        static_cast<std::size_t>(std::max(channels, 0));
  return ImageBuffer(width, height, channels, std::vector<double>(n, value));
}

ImageBuffer ImageBuffer::clamped(int width, int height, int channels, std::vector<double> samples) {
  for (double& s : samples) {
    if (!std::isfinite(s)) throw std::invalid_argument("non-finite sample");
    s = std::clamp(s, 0.0, 1.0);
  }
  return ImageBuffer(width, height, channels, std::move(samples));
}

LumaPlane::LumaPlane(int width, int height, std::vector<double> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  check_shape(width, height, 1, samples_.size());
  for (double s : samples_) {
    if (!std::isfinite(s)) throw std::invalid_argument("non-finite luma sample");
  }
}

ImageBuffer crop_region(const ImageBuffer& img, int x, int y, int width, int height) {
  if (x < 0 || y < 0 || width < 1 || height < 1 || x + width > img.width() ||
      y + height > img.height()) {
    throw std::out_of_range("crop rectangle outside image");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(width) * height * img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    const auto plane = img.plane(c);
    for (int row = y; row < y + height; ++row) {
      const auto begin = plane.begin() + static_cast<std::ptrdiff_t>(row) * img.width() + x;
      out.insert(out.end(), begin, begin + width);
    }
  }
  return ImageBuffer(width, height, img.channels(), std::move(out));
}

ImageBuffer crop_to_multiple(const ImageBuffer& img, int multiple) {
  if (multiple < 1) throw std::invalid_argument("crop multiple must be positive");
  if (img.width() < multiple || img.height() < multiple) {
    throw ShapeError("image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                     " is smaller than the crop multiple " + std::to_string(multiple));
  }
  const int w = img.width() / multiple * multiple;
  const int h = img.height() / multiple * multiple;
  if (w == img.width() && h == img.height()) return img;
  return crop_region(img, 0, 0, w, h);
}

LumaPlane rgb_to_luma(const ImageBuffer& img) {
  if (img.channels() != 3) {
    throw ShapeError("luma conversion needs an RGB image, got " + std::to_string(img.channels()) +
                     " channel(s)");
  }
  const auto r = img.plane(0);
  const auto g = img.plane(1);
  const auto b = img.plane(2);
  std::vector<double> y(img.plane_size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = std::clamp(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i], 0.0, 1.0);
  }
  return LumaPlane(img.width(), img.height(), std::move(y));
}

unsigned char quantize_sample(double sample) noexcept {
  return static_cast<unsigned char>(std::round(std::clamp(sample, 0.0, 1.0) * 255.0));
}

ImageBuffer quantize_8bit(const ImageBuffer& img) {
  std::vector<double> out(img.samples().size());
  const auto in = img.samples();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = quantize_sample(in[i]) / 255.0;
  return ImageBuffer(img.width(), img.height(), img.channels(), std::move(out));
}

}  // namespace dehaze
