#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dehaze/image.hpp"

namespace dehaze {

/// Peak signal-to-noise ratio in dB over all samples and channels.
/// Identical inputs give +infinity. Throws ShapeError on mismatched shapes.
double psnr(std::span<const double> a, std::span<const double> b, double peak = 1.0);
double psnr(const ImageBuffer& a, const ImageBuffer& b, double peak = 1.0);
double psnr(const LumaPlane& a, const LumaPlane& b, double peak = 1.0);

/// Gaussian-window SSIM parameters; the defaults are the usual 11x11, sigma 1.5,
/// K1 = 0.01, K2 = 0.03 on a dynamic range of 1.
struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
std::vector<double> gaussian_taps(const SsimParams& p = {});

/// Single-scale SSIM of two row-major planes, averaged over every window
/// position that lies fully inside the image. Throws ShapeError if the
/// planes differ in size or are smaller than the window.
double ssim(std::span<const double> a, std::span<const double> b, int width, int height,
            const SsimParams& p = {});
double ssim(const LumaPlane& a, const LumaPlane& b, const SsimParams& p = {});
/// Mean of the per-channel SSIM scores.
double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& p = {});

struct MetricEntry {
  std::string pair_id;
  double psnr_y = 0.0;
  double ssim_y = 0.0;
  double psnr_rgb = 0.0;
  double ssim_rgb = 0.0;
  std::optional<double> lpips;  // only set by an external metric hook
};

struct MetricMeans {
  double psnr_y = 0.0;
  double ssim_y = 0.0;
  double psnr_rgb = 0.0;
  double ssim_rgb = 0.0;
  std::optional<double> lpips;
};

struct PairFailure {
  std::string pair_id;
  std::string message;
};

struct MetricReport {
  std::vector<MetricEntry> entries;
  MetricMeans means;
  // Entries with infinite PSNR are left out of that column's mean and counted here.
  std::size_t infinite_psnr_y = 0;
  std::size_t infinite_psnr_rgb = 0;
  std::vector<PairFailure> failures;
};

/// Crops both images to multiples of 8, then computes PSNR/SSIM on the luma
/// plane and on the colour channels. Single-channel pairs use the plane itself
/// as luma. Throws ShapeError if the cropped shapes differ.
MetricEntry evaluate_pair(const std::string& pair_id, const ImageBuffer& restored,
                          const ImageBuffer& gt);

/// Column means; throws std::invalid_argument on an empty entry list.
MetricReport aggregate(std::vector<MetricEntry> entries);

/// CSV with header `pair_id,psnr_y,ssim_y,psnr_rgb,ssim_rgb` (plus `,lpips`
/// when any entry carries it). Infinite PSNR is written as `inf`.
std::string to_csv(const MetricReport& report);
std::string to_json(const MetricReport& report);
void write_report(const MetricReport& report, const std::filesystem::path& csv_path,
                  const std::filesystem::path& json_path);

/// External scalar metric (e.g. a learned perceptual distance). The command
/// template receives `{restored}` and `{gt}` PNG paths and must print one
/// decimal number on stdout.
struct ExternalMetricHook {
  std::string command_template;
};

double run_metric_hook(const ExternalMetricHook& hook, const std::filesystem::path& restored,
                       const std::filesystem::path& gt);

}  // namespace dehaze
