// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "refmv/mesh.hpp"

namespace refmv {

// Unit-scale primitives centered at the origin.
TriMesh make_box(const vec3& half_extent = {0.5, 0.5, 0.5});
TriMesh make_uv_sphere(double radius = 0.5, int rings = 8, int segments = 12);
TriMesh make_cylinder(double radius = 0.35, double half_height = 0.5, int segments = 16);
TriMesh make_cone(double radius = 0.45, double half_height = 0.5, int segments = 16);

// Rotation by Euler angles (radians, applied z then y then x), then scale,
// then translation. Per-axis scale; winding preserved (no negative scales).
TriMesh transform_mesh(const TriMesh& mesh, const vec3& euler, const vec3& scale,
                       const vec3& translation);

// Concatenates meshes (vertex indices offset); albedo lists merged when all
// parts carry one.
TriMesh merge_meshes(const std::vector<TriMesh>& parts);

}  // namespace refmv
