// SPDX-License-Identifier: Apache-2.0
#include "refmv/grid.hpp"

#include <algorithm>

#include "refmv/errors.hpp"

namespace refmv {

MultiViewGrid grid_from_views(const std::array<Image, 6>& views) {
  int r = views[0].width;
  for (const auto& v : views)
    if (v.width != r || v.height != r || v.channels != 3)
      throw ValidationError("grid_from_views: views must be square RGB of equal size");
  MultiViewGrid grid;
  grid.view_res = r;
  grid.image = Image(2 * r, 3 * r, 3);
  for (int i = 0; i < 6; i++) {
    int row0 = (i / 2) * r, col0 = (i % 2) * r;
    for (int y = 0; y < r; y++)
      for (int x = 0; x < r; x++)
        for (int c = 0; c < 3; c++)
          grid.image.at(col0 + x, row0 + y, c) = views[i].at(x, y, c);
  }
  return grid;
}

std::array<Image, 6> views_from_grid(const MultiViewGrid& grid) {
  int r = grid.view_res;
  if (grid.image.width != 2 * r || grid.image.height != 3 * r)
    throw ValidationError("views_from_grid: inconsistent grid");
  std::array<Image, 6> views;
  for (int i = 0; i < 6; i++) {
    views[i] = Image(r, r, 3);
    int row0 = (i / 2) * r, col0 = (i % 2) * r;
    for (int y = 0; y < r; y++)
      for (int x = 0; x < r; x++)
        for (int c = 0; c < 3; c++)
          views[i].at(x, y, c) = grid.image.at(col0 + x, row0 + y, c);
  }
  return views;
}

Tensor image_to_tensor(const Image& img) {
  Tensor t(img.channels, img.height, img.width);
  for (int c = 0; c < img.channels; c++)
    for (int y = 0; y < img.height; y++)
      for (int x = 0; x < img.width; x++) t.at(c, y, x) = img.at(x, y, c);
  return t;
}

Image tensor_to_image(const Tensor& t, bool clamp01) {
  Image img(t.w, t.h, t.c);
  for (int c = 0; c < t.c; c++)
    for (int y = 0; y < t.h; y++)
      for (int x = 0; x < t.w; x++) {
        double v = t.at(c, y, x);
        img.at(x, y, c) = clamp01 ? std::clamp(v, 0.0, 1.0) : v;
      }
  return img;
}

Tensor tile_to_grid(const Tensor& view) {
  Tensor out(view.c, 3 * view.h, 2 * view.w);
  for (int c = 0; c < view.c; c++)
    for (int y = 0; y < out.h; y++)
      for (int x = 0; x < out.w; x++) out.at(c, y, x) = view.at(c, y % view.h, x % view.w);
  return out;
}

Tensor grid_tensor_from_views(const std::array<Image, 6>& views) {
  return image_to_tensor(grid_from_views(views).image);
}

}  // namespace refmv
