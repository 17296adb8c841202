// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace refmv {

// Row-major interleaved image, values in [0,1] (may exceed transiently inside
// the diffusion loop; file I/O clamps).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> px;

  Image() = default;
  Image(int w, int h, int c, double fill = 0.0)
      : width(w), height(h), channels(c), px(size_t(w) * h * c, fill) {}

  double& at(int x, int y, int ch) { return px[(size_t(y) * width + x) * channels + ch]; }
  double at(int x, int y, int ch) const { return px[(size_t(y) * width + x) * channels + ch]; }
  size_t size() const { return px.size(); }
  bool same_shape(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
};

// 16-bit-per-channel RGB PNG; quantizes to 1/65535 steps.
void write_png16(const std::string& path, const Image& img);
// 8-bit single-channel PNG, used for masks (values 0 or 1).
void write_png8(const std::string& path, const Image& img);

// Reads 8- or 16-bit, gray or RGB(A) PNG into a [0,1] image. Alpha dropped,
// gray expanded to the requested channel count only when channels==3.
Image read_png(const std::string& path);

// Mean absolute difference, same-shape images.
double mean_abs_diff(const Image& a, const Image& b);

}  // namespace refmv
