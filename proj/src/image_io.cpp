#include "rlfc/image_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <fstream>
#include <string>

#include "rlfc/errors.hpp"

namespace rlfc {
namespace {

struct MemoryReader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* src = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (src->pos + count > src->bytes.size()) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, src->bytes.data() + src->pos, count);
  src->pos += count;
}

void write_to_memory(png_structp png, png_bytep data, png_size_t count) {
  auto* dst = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  dst->insert(dst->end(), data, data + count);
}

void flush_noop(png_structp) {}

void warn_silently(png_structp, png_const_charp) {}

struct DecodedPng {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> pixels;  // tightly packed rows
};

// Reads any PNG. When `to_rgb8` is set, expands palette/gray to RGB and strips alpha.
DecodedPng decode_png(std::span<const std::uint8_t> bytes, bool to_rgb8) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw FormatError("not a PNG stream");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, warn_silently);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("libpng initialization failed");
  }
  MemoryReader reader{bytes};
  DecodedPng out;
  std::vector<png_bytep> rows;
  std::string failure;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("corrupt PNG stream");
  }
  png_set_read_fn(png, &reader, read_from_memory);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (to_rgb8) {
    if (depth == 16) failure = "16-bit PNG input is not supported (8-bit per channel required)";
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_set_strip_16(png);
  } else {
    if (color != PNG_COLOR_TYPE_GRAY) failure = "expected a single-channel PNG";
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (depth == 16) png_set_swap(png);  // host little endian samples
  }
  png_read_update_info(png, info);
  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.pixels.resize(stride * out.height);
  rows.resize(out.height);
  for (png_uint_32 y = 0; y < out.height; ++y) rows[y] = out.pixels.data() + y * stride;
  if (failure.empty()) {
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (!failure.empty()) throw FormatError(failure);
  return out;
}

std::vector<std::uint8_t> encode_png(int width, int height, int color_type, int bit_depth,
                                     const std::vector<std::uint8_t>& pixels, std::size_t stride) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, warn_silently);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("libpng initialization failed");
  }
  std::vector<std::uint8_t> out;
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("PNG encoding failed");
  }
  png_set_write_fn(png, &out, write_to_memory, flush_noop);
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 9);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * stride);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

RgbImage decode_png_rgb(std::span<const std::uint8_t> bytes) {
  const DecodedPng png = decode_png(bytes, true);
  const int w = static_cast<int>(png.width);
  const int h = static_cast<int>(png.height);
  RgbImage img = make_planes<std::uint8_t>(w, h);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = png.pixels.data() + static_cast<std::size_t>(y) * w * 3;
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) img[c](y, x) = row[3 * x + c];
    }
  }
  return img;
}

RgbImage read_png_rgb(const std::filesystem::path& path) {
  try {
    return decode_png_rgb(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png_rgb(const RgbImage& image) {
  const int w = static_cast<int>(image[0].cols());
  const int h = static_cast<int>(image[0].rows());
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) pixels[(static_cast<std::size_t>(y) * w + x) * 3 + c] = image[c](y, x);
    }
  }
  return encode_png(w, h, PNG_COLOR_TYPE_RGB, 8, pixels, static_cast<std::size_t>(w) * 3);
}

void write_png_rgb(const std::filesystem::path& path, const RgbImage& image) {
  write_file(path, encode_png_rgb(image));
}

std::vector<std::uint8_t> encode_png_gray(const Plane16& plane) {
  const int w = static_cast<int>(plane.cols());
  const int h = static_cast<int>(plane.rows());
  const bool wide = plane.size() > 0 && plane.maxCoeff() > 255;
  const std::size_t bytes_per = wide ? 2 : 1;
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(w) * h * bytes_per);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = (static_cast<std::size_t>(y) * w + x) * bytes_per;
      const std::uint16_t v = plane(y, x);
      pixels[i] = static_cast<std::uint8_t>(v & 0xFF);
      if (wide) pixels[i + 1] = static_cast<std::uint8_t>(v >> 8);
    }
  }
  return encode_png(w, h, PNG_COLOR_TYPE_GRAY, wide ? 16 : 8, pixels, static_cast<std::size_t>(w) * bytes_per);
}

Plane16 decode_png_gray(std::span<const std::uint8_t> bytes) {
  const DecodedPng png = decode_png(bytes, false);
  const int w = static_cast<int>(png.width);
  const int h = static_cast<int>(png.height);
  Plane16 out(h, w);
  const bool wide = png.bit_depth == 16;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = (static_cast<std::size_t>(y) * w + x) * (wide ? 2 : 1);
      out(y, x) = wide ? static_cast<std::uint16_t>(png.pixels[i] | (png.pixels[i + 1] << 8)) : png.pixels[i];
    }
  }
  return out;
}

}  // namespace rlfc
