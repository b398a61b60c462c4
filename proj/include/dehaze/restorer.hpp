#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "dehaze/image.hpp"

namespace dehaze {

struct IdentityRestorer {};

/// Per-sample x^gamma.
struct GammaRestorer {
  double gamma = 1.0;
};

/// Per-channel mean over a (2r+1)^2 window with clamp-to-edge indexing.
struct BoxBlurRestorer {
  int radius = 1;
};

/// A model run as a separate process. The command template must contain
/// `{in}` and `{out}`; they are replaced by absolute PNG paths inside a fresh
/// temporary directory created under `workdir` for every call.
struct ExternalRestorer {
  std::string command_template;
  std::filesystem::path workdir;
};

using RestorerKind = std::variant<IdentityRestorer, GammaRestorer, BoxBlurRestorer, ExternalRestorer>;

struct RestorerSpec {
  RestorerKind kind;
  std::string label;
};

/// Throws ConfigError if a parameter is out of range.
void validate(const RestorerSpec& spec);

ImageBuffer apply_gamma(const ImageBuffer& img, double gamma);
ImageBuffer box_blur(const ImageBuffer& img, int radius);

/// Throws ProcessError (with the captured stderr) on a non-zero exit or an
/// unreadable output, and ShapeError if the output shape differs from the input.
ImageBuffer run_external(const ExternalRestorer& ext, const ImageBuffer& img);

ImageBuffer restore(const RestorerSpec& spec, const ImageBuffer& img);

/// Validates once and binds the spec into a reusable RestoreFn.
RestoreFn make_restorer(RestorerSpec spec);

/// Short description such as "gamma(2.2)".
std::string describe(const RestorerSpec& spec);

}  // namespace dehaze
