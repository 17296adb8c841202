// SPDX-License-Identifier: Apache-2.0
#include "refmv/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>

#include "refmv/errors.hpp"

namespace refmv {

namespace {

struct FileCloser {
  void operator()(FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

uint16_t quant16(double v) {
  if (v < 0) v = 0;
  if (v > 1) v = 1;
  return uint16_t(std::lround(v * 65535.0));
}

}  // namespace

void write_png16(const std::string& path, const Image& img) {
  if (img.channels != 3) throw ValidationError("write_png16: expected 3 channels");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot open for writing: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png write failed: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, 16, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<uint16_t> row(size_t(img.width) * 3);
  std::vector<png_byte> raw(row.size() * 2);
  for (int y = 0; y < img.height; y++) {
    for (int x = 0; x < img.width; x++)
      for (int c = 0; c < 3; c++) row[size_t(x) * 3 + c] = quant16(img.at(x, y, c));
    // PNG stores 16-bit samples big-endian.
    for (size_t i = 0; i < row.size(); i++) {
      raw[2 * i] = png_byte(row[i] >> 8);
      raw[2 * i + 1] = png_byte(row[i] & 0xff);
    }
    png_write_row(png, raw.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_png8(const std::string& path, const Image& img) {
  if (img.channels != 1) throw ValidationError("write_png8: expected 1 channel");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot open for writing: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png write failed: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_byte> row(size_t(img.width));
  for (int y = 0; y < img.height; y++) {
    for (int x = 0; x < img.width; x++) {
      double v = img.at(x, y, 0);
      row[x] = png_byte(std::lround((v < 0 ? 0 : v > 1 ? 1 : v) * 255.0));
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("png read failed: " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int depth = png_get_bit_depth(png, info);
  int color = png_get_color_type(png, info);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  depth = png_get_bit_depth(png, info);
  size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<png_byte> raw(rowbytes);
  Image img(int(w), int(h), 3);
  double scale = depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
  for (png_uint_32 y = 0; y < h; y++) {
    png_read_row(png, raw.data(), nullptr);
    for (png_uint_32 x = 0; x < w; x++) {
      for (int c = 0; c < 3; c++) {
        double v;
        if (depth == 16) {
          size_t i = (size_t(x) * 3 + c) * 2;
          v = double((unsigned(raw[i]) << 8) | raw[i + 1]) * scale;
        } else {
          v = double(raw[size_t(x) * 3 + c]) * scale;
        }
        img.at(int(x), int(y), c) = v;
      }
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

double mean_abs_diff(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw ValidationError("mean_abs_diff: shape mismatch");
  double s = 0;
  for (size_t i = 0; i < a.px.size(); i++) s += std::fabs(a.px[i] - b.px[i]);
  return a.px.empty() ? 0.0 : s / double(a.px.size());
}

}  // namespace refmv
