#pragma once

#include <string>
#include <vector>

#include "dehaze/image.hpp"

namespace dehaze {

enum class Blend { uniform_average, linear_feather };

std::string to_string(Blend blend);
/// Throws ConfigError for unknown names.
Blend parse_blend(const std::string& name);

struct TileConfig {
  int tile = 512;     // multiple of 8
  int overlap = 32;   // 0 <= overlap < tile / 2
  Blend blend = Blend::linear_feather;
};

/// Throws ConfigError if the tile size or overlap is out of range.
void validate(const TileConfig& cfg);

struct TileRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

/// Tile origins along one axis: stride tile - overlap, with the last tile
/// shifted back so it ends exactly at `length`. An axis no longer than the
/// tile is covered by a single tile of extent `length`.
std::vector<int> tile_starts(int length, int tile, int overlap);

/// Row-major tile grid for a width x height image.
std::vector<TileRect> tile_grid(int width, int height, const TileConfig& cfg);

/// Blend weight of every pixel of `rect` (row-major, rect.width * rect.height).
/// linear_feather ramps from 1/(overlap+1) up to 1 across the overlap band on
/// each side that borders another tile; image borders keep full weight.
std::vector<double> tile_weights(const TileRect& rect, int width, int height, const TileConfig& cfg);

/// Total blend weight received by each pixel of the image (row-major).
std::vector<double> weight_coverage(int width, int height, const TileConfig& cfg);

/// Restores every tile independently and blends the results with
/// weight-normalized accumulation. Throws ShapeError if the restorer changes a
/// tile's shape.
ImageBuffer tiled_restore(const RestoreFn& restore, const ImageBuffer& img, const TileConfig& cfg);

/// Wraps a restorer so every call goes through tiled_restore.
RestoreFn tiled(RestoreFn restore, TileConfig cfg);

}  // namespace dehaze
