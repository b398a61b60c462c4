#include "dehaze/png_io.hpp"

#include <png.h>

#include <array>
#include <cerrno>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "dehaze/errors.hpp"

namespace dehaze {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors through longjmp. Everything touched between setjmp and
// a possible longjmp lives behind this heap object, so no automatic variable
// of the calling frame is left indeterminate.
struct DecodeState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  char message[256] = {};
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  int channels_in = 0;
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;

  ~DecodeState() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct EncodeState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  char message[256] = {};
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;

  ~EncodeState() { png_destroy_write_struct(&png, &info); }
};

[[noreturn]] void on_png_error(png_structp png, png_const_charp msg) {
  auto* buffer = static_cast<char*>(png_get_error_ptr(png));
  std::snprintf(buffer, 256, "%s", msg);
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

// Returns false (with state.message set) if libpng raised an error.
bool decode(std::FILE* file, DecodeState& s) {
  s.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, s.message, on_png_error, on_png_warning);
  if (s.png == nullptr) {
    std::snprintf(s.message, sizeof s.message, "png_create_read_struct failed");
    return false;
  }
  s.info = png_create_info_struct(s.png);
  if (s.info == nullptr) {
    std::snprintf(s.message, sizeof s.message, "png_create_info_struct failed");
    return false;
  }
  if (setjmp(png_jmpbuf(s.png))) return false;

  png_init_io(s.png, file);
  png_set_sig_bytes(s.png, 8);
  png_read_info(s.png, s.info);
  s.width = png_get_image_width(s.png, s.info);
  s.height = png_get_image_height(s.png, s.info);
  s.bit_depth = png_get_bit_depth(s.png, s.info);
  s.color_type = png_get_color_type(s.png, s.info);
  if (s.color_type == PNG_COLOR_TYPE_PALETTE) return true;

  if (s.color_type == PNG_COLOR_TYPE_GRAY && s.bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(s.png);
  }
  if (s.color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(s.png);
  png_set_interlace_handling(s.png);
  png_read_update_info(s.png, s.info);

  s.bit_depth = png_get_bit_depth(s.png, s.info);
  s.channels_in = png_get_channels(s.png, s.info);
  const std::size_t row_bytes = png_get_rowbytes(s.png, s.info);
  s.pixels.resize(row_bytes * s.height);
  s.rows.resize(s.height);
  for (png_uint_32 y = 0; y < s.height; ++y) s.rows[y] = s.pixels.data() + y * row_bytes;
  png_read_image(s.png, s.rows.data());
  png_read_end(s.png, nullptr);
  return true;
}

bool encode(std::FILE* file, const ImageBuffer& img, EncodeState& s) {
  s.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, s.message, on_png_error, on_png_warning);
  if (s.png == nullptr) {
    std::snprintf(s.message, sizeof s.message, "png_create_write_struct failed");
    return false;
  }
  s.info = png_create_info_struct(s.png);
  if (s.info == nullptr) {
    std::snprintf(s.message, sizeof s.message, "png_create_info_struct failed");
    return false;
  }

  const int channels = img.channels();
  const std::size_t row_bytes = static_cast<std::size_t>(img.width()) * channels;
  s.pixels.resize(row_bytes * img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < channels; ++c) {
        s.pixels[y * row_bytes + static_cast<std::size_t>(x) * channels + c] =
            quantize_sample(img.at(c, y, x));
      }
    }
  }
  s.rows.resize(img.height());
  for (int y = 0; y < img.height(); ++y) s.rows[y] = s.pixels.data() + y * row_bytes;

  if (setjmp(png_jmpbuf(s.png))) return false;
  png_init_io(s.png, file);
  png_set_IHDR(s.png, s.info, img.width(), img.height(), 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(s.png, s.info);
  png_write_image(s.png, s.rows.data());
  png_write_end(s.png, nullptr);
  return true;
}

}  // namespace

ImageBuffer load_png(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw PngError(PngError::Kind::missing_file, path.string() + ": no such file");
  }
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw PngError(PngError::Kind::missing_file, path.string() + ": cannot open");

  std::array<png_byte, 8> signature{};
  if (std::fread(signature.data(), 1, signature.size(), file.get()) != signature.size() ||
      png_sig_cmp(signature.data(), 0, signature.size()) != 0) {
    throw PngError(PngError::Kind::bad_signature, path.string() + ": not a PNG file");
  }

  auto state = std::make_unique<DecodeState>();
  if (!decode(file.get(), *state)) {
    throw PngError(PngError::Kind::corrupt, path.string() + ": " + state->message);
  }
  if (state->color_type == PNG_COLOR_TYPE_PALETTE) {
    throw PngError(PngError::Kind::unsupported_format,
                   path.string() + ": palette PNGs are not supported");
  }

  const int in_channels = state->channels_in;
  const int channels = in_channels >= 3 ? 3 : 1;
  const int width = static_cast<int>(state->width);
  const int height = static_cast<int>(state->height);
  const bool wide = state->bit_depth == 16;
  const double scale = wide ? 65535.0 : 255.0;
  const std::size_t bytes_per_sample = wide ? 2 : 1;
  const std::size_t plane = static_cast<std::size_t>(width) * height;

  std::vector<double> samples(plane * channels);
  for (int y = 0; y < height; ++y) {
    const png_byte* row = state->rows[y];
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        const png_byte* p = row + (static_cast<std::size_t>(x) * in_channels + c) * bytes_per_sample;
        const unsigned value = wide ? (unsigned{p[0]} << 8) | p[1] : p[0];
        samples[c * plane + static_cast<std::size_t>(y) * width + x] = value / scale;
      }
    }
  }
  return ImageBuffer(width, height, channels, std::move(samples));
}

void save_png(const ImageBuffer& img, const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) {
    throw PngError(PngError::Kind::write_failed,
                   path.string() + ": cannot open for writing: " + std::strerror(errno));
  }
  auto state = std::make_unique<EncodeState>();
  if (!encode(file.get(), img, *state)) {
    throw PngError(PngError::Kind::write_failed, path.string() + ": " + state->message);
  }
  if (std::fflush(file.get()) != 0) {
    throw PngError(PngError::Kind::write_failed, path.string() + ": write failed");
  }
}

}  // namespace dehaze
