#include "dehaze/restorer.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <sstream>
#include <vector>

#include "dehaze/errors.hpp"
#include "dehaze/png_io.hpp"
#include "dehaze/process.hpp"

namespace dehaze {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string shape_of(const ImageBuffer& img) {
  return std::to_string(img.width()) + "x" + std::to_string(img.height()) + "x" +
         std::to_string(img.channels());
}

}  // namespace

void validate(const RestorerSpec& spec) {
  const std::string where = spec.label.empty() ? std::string("restorer") : "restorer '" + spec.label + "'";
  std::visit(overloaded{
                 [](const IdentityRestorer&) {},
                 [&](const GammaRestorer& g) {
                   if (!(g.gamma > 0.0) || !std::isfinite(g.gamma)) {
                     throw ConfigError(where + ": gamma must be a positive number");
                   }
                 },
                 [&](const BoxBlurRestorer& b) {
                   if (b.radius < 1) throw ConfigError(where + ": box_blur radius must be >= 1");
                 },
                 [&](const ExternalRestorer& e) {
                   if (e.command_template.find("{in}") == std::string::npos ||
                       e.command_template.find("{out}") == std::string::npos) {
                     throw ConfigError(where +
                                       ": external command must contain {in} and {out} placeholders");
                   }
                 },
             },
             spec.kind);
}

ImageBuffer apply_gamma(const ImageBuffer& img, double gamma) {
  std::vector<double> out(img.samples().begin(), img.samples().end());
  for (double& v : out) v = std::pow(v, gamma);
  return ImageBuffer::clamped(img.width(), img.height(), img.channels(), std::move(out));
}

ImageBuffer box_blur(const ImageBuffer& img, int radius) {
  const int w = img.width();
  const int h = img.height();
  const std::size_t plane = img.plane_size();
  const double norm = 1.0 / ((2.0 * radius + 1.0) * (2.0 * radius + 1.0));

  std::vector<double> out(img.samples().size());
  std::vector<double> rows(plane);
  for (int c = 0; c < img.channels(); ++c) {
    const auto src = img.plane(c);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int dx = -radius; dx <= radius; ++dx) {
          acc += src[static_cast<std::size_t>(y) * w + std::clamp(x + dx, 0, w - 1)];
        }
        rows[static_cast<std::size_t>(y) * w + x] = acc;
      }
    }
    double* dst = out.data() + c * plane;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int dy = -radius; dy <= radius; ++dy) {
          acc += rows[static_cast<std::size_t>(std::clamp(y + dy, 0, h - 1)) * w + x];
        }
        dst[static_cast<std::size_t>(y) * w + x] = acc * norm;
      }
    }
  }
  return ImageBuffer::clamped(w, h, img.channels(), std::move(out));
}

ImageBuffer run_external(const ExternalRestorer& ext, const ImageBuffer& img) {
  const auto parent = ext.workdir.empty() ? std::filesystem::temp_directory_path() : ext.workdir;
  TempDir scratch(parent, "restore-");
  const auto in_path = scratch.path() / "in.png";
  const auto out_path = scratch.path() / "out.png";
  save_png(img, in_path);

  const std::string command =
      substitute(substitute(ext.command_template, "{in}", in_path.string()), "{out}", out_path.string());
  const ProcessResult result = run_shell(command);
  if (result.exit_code != 0) {
    throw ProcessError("external restorer exited with status " + std::to_string(result.exit_code) +
                       " (command: " + command + ")\nstderr:\n" + result.err);
  }

  std::optional<ImageBuffer> restored;
  try {
    restored.emplace(load_png(out_path));
  } catch (const PngError& e) {
    throw ProcessError(std::string("external restorer produced no readable output: ") + e.what() +
                       "\nstderr:\n" + result.err);
  }
  if (!restored->same_shape(img)) {
    throw ShapeError("external restorer returned " + shape_of(*restored) + " for a " +
                     shape_of(img) + " input\nstderr:\n" + result.err);
  }
  return std::move(*restored);
}

ImageBuffer restore(const RestorerSpec& spec, const ImageBuffer& img) {
  validate(spec);
  return std::visit(overloaded{
                        [&](const IdentityRestorer&) { return img; },
                        [&](const GammaRestorer& g) { return apply_gamma(img, g.gamma); },
                        [&](const BoxBlurRestorer& b) { return box_blur(img, b.radius); },
                        [&](const ExternalRestorer& e) { return run_external(e, img); },
                    },
                    spec.kind);
}

RestoreFn make_restorer(RestorerSpec spec) {
  validate(spec);
  return [spec = std::move(spec)](const ImageBuffer& img) { return restore(spec, img); };
}

std::string describe(const RestorerSpec& spec) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const IdentityRestorer&) { os << "identity"; },
                 [&](const GammaRestorer& g) { os << "gamma(" << g.gamma << ")"; },
                 [&](const BoxBlurRestorer& b) { os << "box_blur(" << b.radius << ")"; },
                 [&](const ExternalRestorer& e) { os << "external(" << e.command_template << ")"; },
             },
             spec.kind);
  return os.str();
}

}  // namespace dehaze
