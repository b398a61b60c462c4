#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dehaze/errors.hpp"
#include "dehaze/image.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using dehaze::ImageBuffer;
using testing_support::distinct_image;
using testing_support::random_image;

TEST(ImageBuffer, RejectsBadShapesAndSamples) {
  EXPECT_THROW(ImageBuffer(0, 1, 1, {}), std::invalid_argument);
  EXPECT_THROW(ImageBuffer(1, 1, 2, {0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(ImageBuffer(2, 1, 1, {0.0}), std::invalid_argument);
  EXPECT_THROW(ImageBuffer(1, 1, 1, {1.5}), std::invalid_argument);
  EXPECT_THROW(ImageBuffer(1, 1, 1, {-0.1}), std::invalid_argument);
  EXPECT_THROW(ImageBuffer(1, 1, 1, {NAN}), std::invalid_argument);
  EXPECT_THROW(ImageBuffer::clamped(1, 1, 1, {INFINITY}), std::invalid_argument);
}

TEST(ImageBuffer, ClampedFactoryClamps) {
  const auto img = ImageBuffer::clamped(3, 1, 1, {-0.5, 0.25, 2.0});
  EXPECT_EQ(img.at(0, 0, 0), 0.0);
  EXPECT_EQ(img.at(0, 0, 1), 0.25);
  EXPECT_EQ(img.at(0, 0, 2), 1.0);
}

TEST(ImageBuffer, PlanarLayout) {
  const auto img = distinct_image(3, 2, 3);
  EXPECT_EQ(img.at(2, 1, 0), img.samples()[2 * 6 + 1 * 3 + 0]);
  EXPECT_EQ(img.plane(1).size(), 6u);
  EXPECT_EQ(img.plane(1)[0], img.at(1, 0, 0));
}

TEST(CropToMultiple, AlignedImageUnchanged) {
  std::mt19937_64 rng(1);
  const auto img = random_image(rng, 1024, 768, 3);
  EXPECT_EQ(dehaze::crop_to_multiple(img, 8), img);
}

TEST(CropToMultiple, FloorsBothDimensions) {
  const auto img = ImageBuffer::filled(1023, 769, 1, 0.5);
  const auto out = dehaze::crop_to_multiple(img, 8);
  EXPECT_EQ(out.width(), 1016);
  EXPECT_EQ(out.height(), 768);
}

TEST(CropToMultiple, KeepsTopLeftRegion) {
  const auto img = distinct_image(17, 9, 3);
  const auto out = dehaze::crop_to_multiple(img, 8);
  ASSERT_EQ(out.width(), 16);
  ASSERT_EQ(out.height(), 8);
  EXPECT_EQ(out, oracle::top_left(img, 16, 8));
}

TEST(CropToMultiple, IsIdempotent) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> dim(8, 60);
    const auto img = random_image(rng, dim(rng), dim(rng), trial % 2 ? 3 : 1);
    const auto once = dehaze::crop_to_multiple(img, 8);
    EXPECT_EQ(dehaze::crop_to_multiple(once, 8), once);
  }
}

TEST(CropToMultiple, TooSmallIsAnError) {
  EXPECT_THROW(dehaze::crop_to_multiple(ImageBuffer::filled(7, 20, 1, 0.0), 8), dehaze::ShapeError);
  EXPECT_THROW(dehaze::crop_to_multiple(ImageBuffer::filled(20, 7, 1, 0.0), 8), dehaze::ShapeError);
}

TEST(RgbToLuma, WhiteIsOne) {
  const auto y = dehaze::rgb_to_luma(ImageBuffer::filled(4, 3, 3, 1.0));
  for (double v : y.samples()) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(RgbToLuma, PureRedReadsOffCoefficient) {
  const ImageBuffer red(1, 1, 3, {1.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(dehaze::rgb_to_luma(red).samples()[0], 0.299);
}

TEST(RgbToLuma, HandArithmetic) {
  const ImageBuffer px(1, 1, 3, {0.2, 0.4, 0.6});
  // 0.299*0.2 + 0.587*0.4 + 0.114*0.6 = 0.0598 + 0.2348 + 0.0684
  EXPECT_NEAR(dehaze::rgb_to_luma(px).samples()[0], 0.3630, 1e-9);
}

TEST(RgbToLuma, SingleChannelIsAnError) {
  EXPECT_THROW(dehaze::rgb_to_luma(ImageBuffer::filled(2, 2, 1, 0.5)), dehaze::ShapeError);
}

TEST(RgbToLuma, BoundedByChannelExtremes) {
  std::mt19937_64 rng(3);
  const auto img = random_image(rng, 31, 17, 3);
  const auto y = dehaze::rgb_to_luma(img);
  for (int row = 0; row < img.height(); ++row) {
    for (int col = 0; col < img.width(); ++col) {
      const double r = img.at(0, row, col), g = img.at(1, row, col), b = img.at(2, row, col);
      const double v = y.samples()[row * img.width() + col];
      EXPECT_GE(v, std::min({r, g, b}) - 1e-15);
      EXPECT_LE(v, std::max({r, g, b}) + 1e-15);
    }
  }
}

TEST(Quantize, RoundsHalfAwayFromZero) {
  EXPECT_EQ(dehaze::quantize_sample(0.5), 128);
  EXPECT_EQ(dehaze::quantize_sample(1.0), 255);
  EXPECT_EQ(dehaze::quantize_sample(0.0), 0);
  EXPECT_EQ(dehaze::quantize_sample(1.0 / 510.0 - 1e-12), 0);
}
