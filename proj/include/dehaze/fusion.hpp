#pragma once

#include <span>
#include <string>
#include <vector>

#include "dehaze/image.hpp"

namespace dehaze {

/// Convex combination weights for snapshot fusion, one per labelled snapshot.
struct FusionWeights {
  std::vector<std::string> labels;
  std::vector<double> weights;
  /// Rescale the weights to sum to 1 instead of rejecting a sum away from 1.
  bool auto_normalize = false;
};

inline constexpr double kWeightSumTolerance = 1e-6;

/// Checks sizes, label uniqueness, non-negativity and the sum rule, and
/// returns the weights that will be used (normalized if requested).
/// Throws ConfigError.
std::vector<double> effective_weights(const FusionWeights& w);

/// Per-sample weighted sum of `images`, clamped to [0, 1].
///
/// Terms are accumulated in ascending label order, so jointly permuting
/// images and weights leaves the result bit-identical.
ImageBuffer fuse(std::span<const ImageBuffer> images, const FusionWeights& w);

}  // namespace dehaze
