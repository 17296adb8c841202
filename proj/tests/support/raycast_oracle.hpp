// SPDX-License-Identifier: Apache-2.0
// Test-only reference renderer: per-pixel ray casting against every triangle.
// Independent of the z-buffer rasterizer it is used to check.
#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "refmv/camera.hpp"
#include "refmv/mesh.hpp"

namespace refmv::testing {

struct RayHit {
  vec3 point;   // canonical-space hit position
  int face = -1;
  double t = 0;
};

// Moller-Trumbore intersection.
inline std::optional<double> ray_triangle(const vec3& origin, const vec3& dir, const vec3& a,
                                          const vec3& b, const vec3& c) {
  vec3 e1 = b - a, e2 = c - a;
  vec3 p = cross(dir, e2);
  double det = dot(e1, p);
  if (std::fabs(det) < 1e-14) return std::nullopt;
  double inv = 1.0 / det;
  vec3 s = origin - a;
  double u = dot(s, p) * inv;
  if (u < -1e-12 || u > 1 + 1e-12) return std::nullopt;
  vec3 q = cross(s, e1);
  double v = dot(dir, q) * inv;
  if (v < -1e-12 || u + v > 1 + 1e-12) return std::nullopt;
  double t = dot(e2, q) * inv;
  if (t <= 1e-9) return std::nullopt;
  return t;
}

// Casts the ray through the pixel center (px, py); returns the nearest hit.
inline std::optional<RayHit> cast_pixel_ray(const TriMesh& mesh, const CameraPose& pose,
                                            int resolution, int px, int py) {
  CameraFrame frame(pose);
  double u = ((px + 0.5) / resolution - 0.5) * 2.0 * frame.tan_half_fov;
  double v = (0.5 - (py + 0.5) / resolution) * 2.0 * frame.tan_half_fov;
  vec3 dir = normalize(frame.right * u + frame.up * v + frame.back * -1.0);

  RayHit best;
  best.t = std::numeric_limits<double>::infinity();
  for (size_t fi = 0; fi < mesh.faces.size(); fi++) {
    const auto& f = mesh.faces[fi];
    auto t = ray_triangle(frame.position, dir, mesh.vertices[f[0]], mesh.vertices[f[1]],
                          mesh.vertices[f[2]]);
    if (t && *t < best.t) {
      best.t = *t;
      best.face = int(fi);
      best.point = frame.position + dir * *t;
    }
  }
  if (best.face < 0) return std::nullopt;
  return best;
}

}  // namespace refmv::testing
