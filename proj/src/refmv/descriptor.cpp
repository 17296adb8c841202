// SPDX-License-Identifier: Apache-2.0
#include "refmv/descriptor.hpp"

#include <algorithm>
#include <cmath>

#include "refmv/errors.hpp"

namespace refmv {

ShapeDescriptor compute_descriptor(const PointCloud& cloud) {
  if (cloud.points.empty()) throw ValidationError("compute_descriptor: empty cloud");

  const int g = kDescriptorOccupancyGrid;
  ShapeDescriptor d;
  d.values.assign(kDescriptorSize, 0.0);

  double inv_n = 1.0 / double(cloud.points.size());
  for (const auto& p : cloud.points) {
    auto cell = [&](double v) {
      int c = int((v + 1.0) * 0.5 * g);
      return std::clamp(c, 0, g - 1);
    };
    d.values[(cell(p.x) * g + cell(p.y)) * g + cell(p.z)] += inv_n;
  }

  // Second-order (6) and third-order (10) raw moments.
  double* m = d.values.data() + g * g * g;
  for (const auto& p : cloud.points) {
    double x = p.x, y = p.y, z = p.z;
    m[0] += x * x;
    m[1] += y * y;
    m[2] += z * z;
    m[3] += x * y;
    m[4] += x * z;
    m[5] += y * z;
    m[6] += x * x * x;
    m[7] += y * y * y;
    m[8] += z * z * z;
    m[9] += x * x * y;
    m[10] += x * x * z;
    m[11] += x * y * y;
    m[12] += y * y * z;
    m[13] += x * z * z;
    m[14] += y * z * z;
    m[15] += x * y * z;
  }
  for (int i = 0; i < kDescriptorMoments; i++) m[i] *= inv_n;

  double norm = 0;
  for (double v : d.values) norm += v * v;
  norm = std::sqrt(norm);
  if (norm <= 0) throw ValidationError("compute_descriptor: zero descriptor");
  for (double& v : d.values) v /= norm;
  return d;
}

double cosine_similarity(const ShapeDescriptor& a, const ShapeDescriptor& b) {
  if (a.values.size() != b.values.size())
    throw ValidationError("cosine_similarity: size mismatch");
  double s = 0;
  for (size_t i = 0; i < a.values.size(); i++) s += a.values[i] * b.values[i];
  return s;
}

}  // namespace refmv
