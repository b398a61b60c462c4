#include <gtest/gtest.h>

#include <random>

#include "dehaze/errors.hpp"
#include "dehaze/restorer.hpp"
#include "dehaze/tiling.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using dehaze::Blend;
using dehaze::ImageBuffer;
using dehaze::TileConfig;

namespace {

double max_abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.samples().size(); ++i) m = std::max(m, std::abs(a.samples()[i] - b.samples()[i]));
  return m;
}

ImageBuffer identity(const ImageBuffer& x) { return x; }

}  // namespace

TEST(TileStarts, ShortAxisIsOneTile) {
  EXPECT_EQ(dehaze::tile_starts(40, 64, 16), std::vector<int>{0});
  EXPECT_EQ(dehaze::tile_starts(64, 64, 16), std::vector<int>{0});
}

TEST(TileStarts, LastTileIsShiftedToBorder) {
  EXPECT_EQ(dehaze::tile_starts(160, 64, 16), (std::vector<int>{0, 48, 96}));
  EXPECT_EQ(dehaze::tile_starts(100, 64, 16), (std::vector<int>{0, 36}));
  EXPECT_EQ(dehaze::tile_starts(128, 64, 0), (std::vector<int>{0, 64}));
}

TEST(TileConfig, Validation) {
  EXPECT_THROW(dehaze::validate(TileConfig{60, 8, Blend::linear_feather}), dehaze::ConfigError);
  EXPECT_THROW(dehaze::validate(TileConfig{0, 0, Blend::linear_feather}), dehaze::ConfigError);
  EXPECT_THROW(dehaze::validate(TileConfig{64, 32, Blend::linear_feather}), dehaze::ConfigError);
  EXPECT_THROW(dehaze::validate(TileConfig{64, -1, Blend::linear_feather}), dehaze::ConfigError);
  EXPECT_NO_THROW(dehaze::validate(TileConfig{64, 31, Blend::linear_feather}));
  EXPECT_THROW(dehaze::parse_blend("gaussian"), dehaze::ConfigError);
  EXPECT_EQ(dehaze::parse_blend("uniform_average"), Blend::uniform_average);
}

TEST(Tiling, IdentityReproducesInput) {
  std::mt19937_64 rng(1);
  const auto img = testing_support::random_image(rng, 150, 90, 3);
  for (auto blend : {Blend::uniform_average, Blend::linear_feather}) {
    EXPECT_LE(max_abs_diff(dehaze::tiled_restore(identity, img, {32, 8, blend}), img), 1e-7);
  }
}

TEST(Tiling, PixelwiseRestorerMatchesWholeImage) {
  std::mt19937_64 rng(2);
  const auto img = testing_support::random_image(rng, 160, 96, 3);
  const auto gamma = dehaze::make_restorer({dehaze::GammaRestorer{2.2}, "g"});
  EXPECT_LE(max_abs_diff(dehaze::tiled_restore(gamma, img, {64, 16, Blend::linear_feather}), gamma(img)), 1e-7);
}

TEST(Tiling, BoxBlurMatchesOracle) {
  std::mt19937_64 rng(3);
  const auto img = testing_support::random_image(rng, 75, 50, 3);
  const auto blur = [](const ImageBuffer& x) { return dehaze::box_blur(x, 2); };
  for (auto blend : {Blend::uniform_average, Blend::linear_feather}) {
    const auto out = dehaze::tiled_restore(blur, img, {24, 8, blend});
    const auto ref = oracle::tiled(blur, img, 24, 8, blend == Blend::linear_feather);
    EXPECT_LE(max_abs_diff(out, ref), 1e-9);
  }
}

TEST(Tiling, CoverageIsPositiveEverywhere) {
  for (int tile : {8, 16, 32}) {
    for (int overlap = 0; 2 * overlap < tile; overlap += 3) {
      for (auto blend : {Blend::uniform_average, Blend::linear_feather}) {
        for (auto [w, h] : {std::pair{tile, tile}, std::pair{tile + 1, 3}, std::pair{3 * tile - 5, 2 * tile + 7}}) {
          const auto cov = dehaze::weight_coverage(w, h, {tile, overlap, blend});
          for (double c : cov) ASSERT_GT(c, 0.0) << tile << " " << overlap << " " << w << "x" << h;
        }
      }
    }
  }
}

TEST(Tiling, ZeroOverlapUniformIsPurePaste) {
  std::mt19937_64 rng(4);
  const auto img = testing_support::random_image(rng, 64, 32, 1);
  const auto out = dehaze::tiled_restore([](const ImageBuffer& x) { return dehaze::apply_gamma(x, 0.5); }, img,
                                         {16, 0, Blend::uniform_average});
  EXPECT_EQ(out, dehaze::apply_gamma(img, 0.5));
}

TEST(Tiling, SingleTileCallsRestorerOnWholeImage) {
  int calls = 0;
  const auto img = ImageBuffer::filled(30, 20, 3, 0.3);
  dehaze::tiled_restore([&](const ImageBuffer& x) { ++calls; EXPECT_TRUE(x.same_shape(img)); return x; }, img,
                        {32, 8, Blend::linear_feather});
  EXPECT_EQ(calls, 1);
}

TEST(Tiling, FeatherWeightsRampOnInteriorSidesOnly) {
  const TileConfig cfg{16, 3, Blend::linear_feather};
  const auto grid = dehaze::tile_grid(29, 16, cfg);
  ASSERT_EQ(grid.size(), 2u);
  const auto left = dehaze::tile_weights(grid[0], 29, 16, cfg);
  EXPECT_DOUBLE_EQ(left[0], 1.0);
  EXPECT_DOUBLE_EQ(left[15], 0.25);
  EXPECT_DOUBLE_EQ(left[13], 0.75);
  const auto right = dehaze::tile_weights(grid[1], 29, 16, cfg);
  EXPECT_DOUBLE_EQ(right[0], 0.25);
  EXPECT_DOUBLE_EQ(right[15], 1.0);
}

TEST(Tiling, ShapeChangeIsRejected) {
  const auto img = ImageBuffer::filled(40, 40, 1, 0.3);
  EXPECT_THROW(dehaze::tiled_restore([](const ImageBuffer& x) { return dehaze::crop_region(x, 0, 0, 8, 8); }, img,
                                     {16, 4, Blend::linear_feather}),
               dehaze::ShapeError);
}
