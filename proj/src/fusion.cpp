#include "dehaze/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "dehaze/errors.hpp"

namespace dehaze {

std::vector<double> effective_weights(const FusionWeights& w) {
  if (w.weights.empty()) throw ConfigError("fusion needs at least one weight");
  if (w.labels.size() != w.weights.size()) {
    throw ConfigError("fusion has " + std::to_string(w.weights.size()) + " weights but " +
                      std::to_string(w.labels.size()) + " labels");
  }
  if (std::set<std::string>(w.labels.begin(), w.labels.end()).size() != w.labels.size()) {
    throw ConfigError("fusion labels must be unique");
  }
  for (std::size_t i = 0; i < w.weights.size(); ++i) {
    if (!std::isfinite(w.weights[i]) || w.weights[i] < 0.0) {
      throw ConfigError("fusion weight " + std::to_string(i) + " ('" + w.labels[i] +
                        "') must be a non-negative number");
    }
  }
  const double sum = std::accumulate(w.weights.begin(), w.weights.end(), 0.0);
  if (w.auto_normalize) {
    if (!(sum > 0.0)) throw ConfigError("cannot normalize fusion weights that sum to 0");
    std::vector<double> out = w.weights;
    for (double& v : out) v /= sum;
    return out;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw ConfigError("fusion weights sum to " + std::to_string(sum) +
                      ", expected 1 (enable normalization to rescale)");
  }
  return w.weights;
}

ImageBuffer fuse(std::span<const ImageBuffer> images, const FusionWeights& w) {
  if (images.empty()) throw ConfigError("fusion needs at least one image");
  if (images.size() != w.weights.size()) {
    throw ConfigError("fusion got " + std::to_string(images.size()) + " images but " +
                      std::to_string(w.weights.size()) + " weights");
  }
  const std::vector<double> weights = effective_weights(w);
  for (std::size_t i = 1; i < images.size(); ++i) {
    if (!images[i].same_shape(images[0])) {
      throw ShapeError("fusion input " + std::to_string(i) + " ('" + w.labels[i] +
                       "') has a different shape than input 0");
    }
  }

  std::vector<std::size_t> order(images.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return w.labels[a] < w.labels[b]; });

  std::vector<double> out(images[0].samples().size(), 0.0);
  for (const std::size_t k : order) {
    const auto src = images[k].samples();
    const double weight = weights[k];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += weight * src[i];
  }
  const auto& ref = images[0];
  return ImageBuffer::clamped(ref.width(), ref.height(), ref.channels(), std::move(out));
}

}  // namespace dehaze
