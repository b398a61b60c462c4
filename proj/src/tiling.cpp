#include "dehaze/tiling.hpp"

#include <algorithm>

#include "dehaze/errors.hpp"

namespace dehaze {

std::string to_string(Blend blend) {
  return blend == Blend::uniform_average ? "uniform_average" : "linear_feather";
}

Blend parse_blend(const std::string& name) {
  if (name == "uniform_average") return Blend::uniform_average;
  if (name == "linear_feather") return Blend::linear_feather;
  throw ConfigError("unknown blend '" + name + "' (expected uniform_average or linear_feather)");
}

void validate(const TileConfig& cfg) {
  if (cfg.tile < 8 || cfg.tile % 8 != 0) {
    throw ConfigError("tile size must be a positive multiple of 8, got " + std::to_string(cfg.tile));
  }
  if (cfg.overlap < 0 || 2 * cfg.overlap >= cfg.tile) {
    throw ConfigError("tile overlap must satisfy 0 <= overlap < tile/2, got " +
                      std::to_string(cfg.overlap));
  }
}

std::vector<int> tile_starts(int length, int tile, int overlap) {
  if (length <= tile) return {0};
  const int stride = tile - overlap;
  std::vector<int> starts;
  for (int pos = 0;; pos += stride) {
    if (pos + tile >= length) {
      starts.push_back(length - tile);
      break;
    }
    starts.push_back(pos);
  }
  return starts;
}

std::vector<TileRect> tile_grid(int width, int height, const TileConfig& cfg) {
  validate(cfg);
  const auto xs = tile_starts(width, cfg.tile, cfg.overlap);
  const auto ys = tile_starts(height, cfg.tile, cfg.overlap);
  const int tw = std::min(width, cfg.tile);
  const int th = std::min(height, cfg.tile);
  std::vector<TileRect> grid;
  grid.reserve(xs.size() * ys.size());
  for (const int y : ys) {
    for (const int x : xs) grid.push_back({x, y, tw, th});
  }
  return grid;
}

namespace {

std::vector<double> axis_ramp(int start, int extent, int length, const TileConfig& cfg) {
  std::vector<double> ramp(static_cast<std::size_t>(extent), 1.0);
  if (cfg.blend == Blend::uniform_average || cfg.overlap == 0) return ramp;
  const double band = cfg.overlap + 1.0;
  const bool lead = start > 0;
  const bool trail = start + extent < length;
  for (int i = 0; i < extent; ++i) {
    double w = 1.0;
    if (lead && i < cfg.overlap) w = std::min(w, (i + 1) / band);
    if (trail && i >= extent - cfg.overlap) w = std::min(w, (extent - i) / band);
    ramp[static_cast<std::size_t>(i)] = w;
  }
  return ramp;
}

}  // namespace

std::vector<double> tile_weights(const TileRect& rect, int width, int height, const TileConfig& cfg) {
  const auto wx = axis_ramp(rect.x, rect.width, width, cfg);
  const auto wy = axis_ramp(rect.y, rect.height, height, cfg);
  std::vector<double> out(static_cast<std::size_t>(rect.width) * rect.height);
  for (int j = 0; j < rect.height; ++j) {
    for (int i = 0; i < rect.width; ++i) {
      out[static_cast<std::size_t>(j) * rect.width + i] = wy[j] * wx[i];
    }
  }
  return out;
}

std::vector<double> weight_coverage(int width, int height, const TileConfig& cfg) {
  std::vector<double> total(static_cast<std::size_t>(width) * height, 0.0);
  for (const auto& rect : tile_grid(width, height, cfg)) {
    const auto w = tile_weights(rect, width, height, cfg);
    for (int j = 0; j < rect.height; ++j) {
      for (int i = 0; i < rect.width; ++i) {
        total[static_cast<std::size_t>(rect.y + j) * width + rect.x + i] +=
            w[static_cast<std::size_t>(j) * rect.width + i];
      }
    }
  }
  return total;
}

ImageBuffer tiled_restore(const RestoreFn& restore, const ImageBuffer& img, const TileConfig& cfg) {
  const auto grid = tile_grid(img.width(), img.height(), cfg);
  if (grid.size() == 1) {
    ImageBuffer out = restore(img);
    if (!out.same_shape(img)) throw ShapeError("restorer changed the shape of the single tile");
    return out;
  }

  const int width = img.width();
  const std::size_t plane = img.plane_size();
  std::vector<double> acc(img.samples().size(), 0.0);
  std::vector<double> weight_sum(plane, 0.0);

  for (const auto& rect : grid) {
    const ImageBuffer tile = crop_region(img, rect.x, rect.y, rect.width, rect.height);
    const ImageBuffer restored = restore(tile);
    if (!restored.same_shape(tile)) {
      throw ShapeError("restorer changed the shape of tile at (" + std::to_string(rect.x) + "," +
                       std::to_string(rect.y) + ")");
    }
    const auto w = tile_weights(rect, img.width(), img.height(), cfg);
    for (int j = 0; j < rect.height; ++j) {
      for (int i = 0; i < rect.width; ++i) {
        const std::size_t local = static_cast<std::size_t>(j) * rect.width + i;
        const std::size_t global = static_cast<std::size_t>(rect.y + j) * width + rect.x + i;
        weight_sum[global] += w[local];
        for (int c = 0; c < img.channels(); ++c) {
          acc[c * plane + global] += w[local] * restored.at(c, j, i);
        }
      }
    }
  }

  for (int c = 0; c < img.channels(); ++c) {
    for (std::size_t p = 0; p < plane; ++p) acc[c * plane + p] /= weight_sum[p];
  }
  return ImageBuffer::clamped(img.width(), img.height(), img.channels(), std::move(acc));
}

RestoreFn tiled(RestoreFn restore, TileConfig cfg) {
  validate(cfg);
  return [restore = std::move(restore), cfg](const ImageBuffer& img) {
    return tiled_restore(restore, img, cfg);
  };
}

}  // namespace dehaze
