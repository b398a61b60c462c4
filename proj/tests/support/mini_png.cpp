#include "mini_png.hpp"

#include <zlib.h>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace testpng {

namespace {

constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

void put_chunk(std::vector<std::uint8_t>& out, const char* type, const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + start, static_cast<uInt>(data.size() + 4));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a);
  const int pb = std::abs(p - b);
  const int pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

int Raw::channels() const {
  switch (color_type) {
    case 0: return 1;
    case 2: return 3;
    case 3: return 1;
    case 4: return 2;
    case 6: return 4;
    default: throw std::runtime_error("bad color type");
  }
}

std::vector<std::uint8_t> encode(const Raw& raw) {
  const int ch = raw.channels();
  const int bytes = raw.bit_depth / 8;
  std::vector<std::uint8_t> filtered;
  for (int y = 0; y < raw.height; ++y) {
    filtered.push_back(0);
    for (int i = 0; i < raw.width * ch; ++i) {
      const std::uint16_t v = raw.samples[static_cast<std::size_t>(y) * raw.width * ch + i];
      if (bytes == 2) filtered.push_back(static_cast<std::uint8_t>(v >> 8));
      filtered.push_back(static_cast<std::uint8_t>(v & 0xFF));
    }
  }
  uLongf size = compressBound(static_cast<uLong>(filtered.size()));
  std::vector<std::uint8_t> z(size);
  if (compress(z.data(), &size, filtered.data(), static_cast<uLong>(filtered.size())) != Z_OK) {
    throw std::runtime_error("zlib compress failed");
  }
  z.resize(size);

  std::vector<std::uint8_t> out(kSignature, kSignature + 8);
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(raw.width));
  put_u32(ihdr, static_cast<std::uint32_t>(raw.height));
  ihdr.push_back(static_cast<std::uint8_t>(raw.bit_depth));
  ihdr.push_back(static_cast<std::uint8_t>(raw.color_type));
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  put_chunk(out, "IHDR", ihdr);
  if (raw.color_type == 3) put_chunk(out, "PLTE", raw.palette);
  put_chunk(out, "IDAT", z);
  put_chunk(out, "IEND", {});
  return out;
}

Raw decode(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0) {
    throw std::runtime_error("not a PNG");
  }
  Raw raw;
  std::vector<std::uint8_t> idat;
  std::size_t pos = 8;
  while (pos + 12 <= bytes.size()) {
    const std::uint32_t len = get_u32(&bytes[pos]);
    const std::string type(reinterpret_cast<const char*>(&bytes[pos + 4]), 4);
    const std::uint8_t* data = &bytes[pos + 8];
    const std::uint32_t crc = get_u32(&bytes[pos + 8 + len]);
    if (crc != crc32(0L, &bytes[pos + 4], len + 4)) throw std::runtime_error("CRC mismatch in " + type);
    if (type == "IHDR") {
      raw.width = static_cast<int>(get_u32(data));
      raw.height = static_cast<int>(get_u32(data + 4));
      raw.bit_depth = data[8];
      raw.color_type = data[9];
      if (data[12] != 0) throw std::runtime_error("interlaced PNGs not handled");
    } else if (type == "PLTE") {
      raw.palette.assign(data, data + len);
    } else if (type == "IDAT") {
      idat.insert(idat.end(), data, data + len);
    } else if (type == "IEND") {
      break;
    }
    pos += 12 + len;
  }
  if (raw.bit_depth != 8 && raw.bit_depth != 16) throw std::runtime_error("bit depth not handled");

  const int ch = raw.channels();
  const int bpp = ch * raw.bit_depth / 8;
  const std::size_t stride = static_cast<std::size_t>(raw.width) * bpp;
  std::vector<std::uint8_t> inflated((stride + 1) * raw.height);
  uLongf size = static_cast<uLongf>(inflated.size());
  if (uncompress(inflated.data(), &size, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      size != inflated.size()) {
    throw std::runtime_error("zlib uncompress failed");
  }

  std::vector<std::uint8_t> pixels(stride * raw.height);
  for (int y = 0; y < raw.height; ++y) {
    const std::uint8_t filter = inflated[y * (stride + 1)];
    const std::uint8_t* src = &inflated[y * (stride + 1) + 1];
    std::uint8_t* row = &pixels[y * stride];
    const std::uint8_t* prev = y > 0 ? &pixels[(y - 1) * stride] : nullptr;
    for (std::size_t i = 0; i < stride; ++i) {
      const int a = i >= static_cast<std::size_t>(bpp) ? row[i - bpp] : 0;
      const int b = prev ? prev[i] : 0;
      const int c = (prev && i >= static_cast<std::size_t>(bpp)) ? prev[i - bpp] : 0;
      int pred = 0;
      switch (filter) {
        case 0: pred = 0; break;
        case 1: pred = a; break;
        case 2: pred = b; break;
        case 3: pred = (a + b) / 2; break;
        case 4: pred = paeth(a, b, c); break;
        default: throw std::runtime_error("bad filter type");
      }
      row[i] = static_cast<std::uint8_t>(src[i] + pred);
    }
  }

  raw.samples.resize(static_cast<std::size_t>(raw.width) * raw.height * ch);
  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    raw.samples[i] = raw.bit_depth == 16 ? static_cast<std::uint16_t>((pixels[2 * i] << 8) | pixels[2 * i + 1])
                                         : pixels[i];
  }
  return raw;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testpng
