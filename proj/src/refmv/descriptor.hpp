// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "refmv/mesh.hpp"

namespace refmv {

// Unit-norm geometric shape descriptor: a 4x4x4 occupancy histogram over
// [-1,1]^3 concatenated with second- and third-order coordinate moments
// (80 values total). Translation-sensitive by design; inputs are expected to
// be unit-sphere normalized.
struct ShapeDescriptor {
  std::vector<double> values;
};

constexpr int kDescriptorOccupancyGrid = 4;
constexpr int kDescriptorMoments = 16;
constexpr int kDescriptorSize =
    kDescriptorOccupancyGrid * kDescriptorOccupancyGrid * kDescriptorOccupancyGrid +
    kDescriptorMoments;

// Protocol point count for descriptor extraction.
constexpr int kDescriptorPointCount = 10000;

ShapeDescriptor compute_descriptor(const PointCloud& cloud);
double cosine_similarity(const ShapeDescriptor& a, const ShapeDescriptor& b);

}  // namespace refmv
