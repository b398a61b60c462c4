#include "dehaze/geometry.hpp"

#include <future>
#include <optional>
#include <vector>

#include "dehaze/errors.hpp"

namespace dehaze {

DihedralTransform inverse(DihedralTransform t) noexcept {
  // A transpose conjugates vflip into hflip, so moving it to the front of the
  // canonical order swaps the two flip flags.
  if (t.transpose) return {t.hflip, t.vflip, true};
  return t;
}

DihedralTransform compose(DihedralTransform first, DihedralTransform second) noexcept {
  const bool swap = first.transpose;
  return {
      (swap ? second.hflip : second.vflip) != first.vflip,
      (swap ? second.vflip : second.hflip) != first.hflip,
      second.transpose != first.transpose,
  };
}

std::string to_string(DihedralTransform t) {
  std::string out;
  auto add = [&out](const char* part) {
    if (!out.empty()) out += '+';
    out += part;
  };
  if (t.vflip) add("vflip");
  if (t.hflip) add("hflip");
  if (t.transpose) add("transpose");
  return out.empty() ? "identity" : out;
}

ImageBuffer apply(DihedralTransform t, const ImageBuffer& img) {
  const int in_w = img.width();
  const int in_h = img.height();
  const int out_w = t.transpose ? in_h : in_w;
  const int out_h = t.transpose ? in_w : in_h;

  std::vector<double> out(img.samples().size());
  const std::size_t plane = img.plane_size();
  for (int c = 0; c < img.channels(); ++c) {
    const auto src = img.plane(c);
    double* dst = out.data() + c * plane;
    for (int y = 0; y < out_h; ++y) {
      for (int x = 0; x < out_w; ++x) {
        int sy = t.transpose ? x : y;
        int sx = t.transpose ? y : x;
        if (t.hflip) sx = in_w - 1 - sx;
        if (t.vflip) sy = in_h - 1 - sy;
        dst[static_cast<std::size_t>(y) * out_w + x] = src[static_cast<std::size_t>(sy) * in_w + sx];
      }
    }
  }
  return ImageBuffer(out_w, out_h, img.channels(), std::move(out));
}

namespace {

ImageBuffer run_branch(const RestoreFn& restore, const ImageBuffer& img, DihedralTransform t) {
  const ImageBuffer moved = apply(t, img);
  const ImageBuffer restored = restore(moved);
  if (!restored.same_shape(moved)) {
    throw ShapeError("restorer changed the image shape in self-ensemble branch " + to_string(t) +
                     ": expected " + std::to_string(moved.width()) + "x" +
                     std::to_string(moved.height()) + "x" + std::to_string(moved.channels()) +
                     ", got " + std::to_string(restored.width()) + "x" +
                     std::to_string(restored.height()) + "x" +
                     std::to_string(restored.channels()));
  }
  return apply(inverse(t), restored);
}

}  // namespace

ImageBuffer self_ensemble(const RestoreFn& restore, const ImageBuffer& img,
                          EnsembleOptions options) {
  constexpr auto transforms = all_transforms();
  std::vector<std::optional<ImageBuffer>> branches(transforms.size());

  if (options.parallel) {
    std::vector<std::future<ImageBuffer>> pending;
    pending.reserve(transforms.size());
    for (const auto t : transforms) {
      pending.push_back(std::async(std::launch::async,
                                   [&restore, &img, t] { return run_branch(restore, img, t); }));
    }
    // get() in order so the first failing branch (by index) is the one reported.
    for (std::size_t i = 0; i < pending.size(); ++i) branches[i].emplace(pending[i].get());
  } else {
    for (std::size_t i = 0; i < transforms.size(); ++i) {
      branches[i].emplace(run_branch(restore, img, transforms[i]));
    }
  }

  std::vector<double> sum(img.samples().size(), 0.0);
  for (const auto& branch : branches) {
    const auto s = branch->samples();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += s[i];
  }
  for (double& v : sum) v *= 0.125;
  return ImageBuffer::clamped(img.width(), img.height(), img.channels(), std::move(sum));
}

}  // namespace dehaze
