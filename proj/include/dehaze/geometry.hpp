#pragma once

#include <array>
#include <string>

#include "dehaze/image.hpp"

namespace dehaze {

/// One element of the dihedral group acting on the pixel grid.
///
/// Applying a transform runs its parts in a fixed order: vertical flip, then
/// horizontal flip, then transpose. Each of the 8 flag combinations names a
/// distinct group element.
struct DihedralTransform {
  bool vflip = false;
  bool hflip = false;
  bool transpose = false;

  /// Bit 0 vflip, bit 1 hflip, bit 2 transpose.
  constexpr int index() const noexcept {
    return (vflip ? 1 : 0) | (hflip ? 2 : 0) | (transpose ? 4 : 0);
  }
  static constexpr DihedralTransform from_index(int i) noexcept {
    return {(i & 1) != 0, (i & 2) != 0, (i & 4) != 0};
  }

  friend constexpr bool operator==(DihedralTransform, DihedralTransform) = default;
};

/// All 8 transforms in index order; index 0 is the identity.
constexpr std::array<DihedralTransform, 8> all_transforms() noexcept {
  std::array<DihedralTransform, 8> out{};
  for (int i = 0; i < 8; ++i) out[i] = DihedralTransform::from_index(i);
  return out;
}

DihedralTransform inverse(DihedralTransform t) noexcept;

/// The single transform equivalent to applying `first` and then `second`.
DihedralTransform compose(DihedralTransform first, DihedralTransform second) noexcept;

/// e.g. "identity", "vflip+transpose".
std::string to_string(DihedralTransform t);

/// Pure sample permutation; width and height swap iff t.transpose.
ImageBuffer apply(DihedralTransform t, const ImageBuffer& img);

struct EnsembleOptions {
  /// Run the 8 restorer calls on separate threads. The reduction order is
  /// fixed, so the result is bit-identical either way.
  bool parallel = false;
};

/// x8 geometric self-ensemble: the mean over all 8 transforms t of
/// inverse(t) applied to restore(t applied to img), clamped to [0, 1] once
/// after averaging. Throws ShapeError naming the transform if the restorer
/// changes the dimensions of any branch.
ImageBuffer self_ensemble(const RestoreFn& restore, const ImageBuffer& img,
                          EnsembleOptions options = {});

}  // namespace dehaze
