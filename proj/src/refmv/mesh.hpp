// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "refmv/rng.hpp"
#include "refmv/vec.hpp"

namespace refmv {

// Indexed triangle mesh in canonical (unitless) coordinates.
// face_albedo is optional per-face flat color used by the shaded renderer;
// empty means the default gray.
struct TriMesh {
  std::vector<vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<vec3> face_albedo;

  bool has_albedo() const { return !face_albedo.empty(); }
};

struct PointCloud {
  std::vector<vec3> points;
};

double triangle_area(const vec3& a, const vec3& b, const vec3& c);
double surface_area(const TriMesh& mesh);
vec3 face_normal(const TriMesh& mesh, int face);

// OBJ subset loader: v/f records, polygons fan-triangulated, zero-area faces
// dropped. Indices may be 1-based or negative-relative.
TriMesh load_mesh(const std::string& path);
TriMesh parse_obj(const std::string& text, const std::string& origin = "<memory>");
void save_obj(const std::string& path, const TriMesh& mesh);

// Recenter on the bounding-box center and scale so the farthest vertex sits at
// distance 1 from the origin.
TriMesh normalize_unit_sphere(const TriMesh& mesh);

// Area-weighted surface sampling with uniform barycentric placement.
PointCloud sample_points(const TriMesh& mesh, int n, uint64_t seed);

}  // namespace refmv
