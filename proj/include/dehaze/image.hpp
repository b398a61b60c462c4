#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dehaze {

/// Floating-point image with samples in [0, 1].
///
/// Layout is channel-planar and row-major: the sample for channel `c` at
/// row `y`, column `x` lives at `c * width * height + y * width + x`.
/// Every constructor validates the shape and range invariants, so a live
/// ImageBuffer is always well formed.
class ImageBuffer {
 public:
  /// Throws std::invalid_argument on a bad shape, a non-finite sample or a
  /// sample outside [0, 1].
  ImageBuffer(int width, int height, int channels, std::vector<double> samples);

  static ImageBuffer filled(int width, int height, int channels, double value);

  /// Clamps every sample into [0, 1]. Non-finite samples are still rejected.
  static ImageBuffer clamped(int width, int height, int channels, std::vector<double> samples);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  double at(int c, int y, int x) const noexcept {
    return samples_[static_cast<std::size_t>(c) * plane_size() +
                    static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                    static_cast<std::size_t>(x)];
  }

  std::span<const double> samples() const noexcept { return samples_; }
  std::span<const double> plane(int c) const noexcept {
    return std::span<const double>(samples_).subspan(static_cast<std::size_t>(c) * plane_size(),
                                                     plane_size());
  }

  bool same_shape(const ImageBuffer& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  int width_;
  int height_;
  int channels_;
  std::vector<double> samples_;
};

/// Single-channel luma signal derived from an RGB image.
class LumaPlane {
 public:
  LumaPlane(int width, int height, std::vector<double> samples);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const double> samples() const noexcept { return samples_; }

  friend bool operator==(const LumaPlane&, const LumaPlane&) = default;

 private:
  int width_;
  int height_;
  std::vector<double> samples_;
};

/// Any dimension-preserving image-to-image mapping.
using RestoreFn = std::function<ImageBuffer(const ImageBuffer&)>;

/// Top-left sub-rectangle. Throws std::out_of_range if the rectangle leaves the image.
ImageBuffer crop_region(const ImageBuffer& img, int x, int y, int width, int height);

/// Floors both dimensions to a multiple of `multiple`, keeping the top-left
/// corner. Throws ShapeError if the image is smaller than `multiple`.
ImageBuffer crop_to_multiple(const ImageBuffer& img, int multiple = 8);

/// Full-range BT.601 luma, Y = 0.299 R + 0.587 G + 0.114 B.
/// Throws ShapeError for single-channel input.
LumaPlane rgb_to_luma(const ImageBuffer& img);

/// The 8-bit code a sample is stored as: round(sample * 255), ties away from zero.
unsigned char quantize_sample(double sample) noexcept;

/// The image exactly as it reads back after an 8-bit PNG round trip.
ImageBuffer quantize_8bit(const ImageBuffer& img);

}  // namespace dehaze
