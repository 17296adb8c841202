// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

#include "refmv/image.hpp"
#include "refmv/tensor.hpp"

namespace refmv {

// Six R x R views tiled 3 rows x 2 columns in protocol order: view i occupies
// row block i/2 and column block i%2.
struct MultiViewGrid {
  Image image;  // (2R wide, 3R tall, 3 channels), values in [0,1]
  int view_res = 0;
};

MultiViewGrid grid_from_views(const std::array<Image, 6>& views);
std::array<Image, 6> views_from_grid(const MultiViewGrid& grid);

// Interleaved [0,1] image <-> channel-major tensor.
Tensor image_to_tensor(const Image& img);
Image tensor_to_image(const Tensor& t, bool clamp01 = true);

// Repeats a (c, R, R) view into the (c, 3R, 2R) grid layout.
Tensor tile_to_grid(const Tensor& view);

// Assembles six images directly into a grid-shaped tensor.
Tensor grid_tensor_from_views(const std::array<Image, 6>& views);

}  // namespace refmv
