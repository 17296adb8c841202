// SPDX-License-Identifier: Apache-2.0
#include "refmv/primitives.hpp"

#include <cmath>

namespace refmv {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TriMesh make_box(const vec3& he) {
  TriMesh m;
  for (int i = 0; i < 8; i++)
    m.vertices.push_back({(i & 1 ? he.x : -he.x), (i & 2 ? he.y : -he.y), (i & 4 ? he.z : -he.z)});
  const int quads[6][4] = {
      {0, 2, 3, 1},  // -z
      {4, 5, 7, 6},  // +z
      {0, 1, 5, 4},  // -y
      {2, 6, 7, 3},  // +y
      {0, 4, 6, 2},  // -x
      {1, 3, 7, 5},  // +x
  };
  for (const auto& q : quads) {
    m.faces.push_back({q[0], q[1], q[2]});
    m.faces.push_back({q[0], q[2], q[3]});
  }
  return m;
}

TriMesh make_uv_sphere(double radius, int rings, int segments) {
  TriMesh m;
  // rings+1 latitude rows including poles
  for (int r = 0; r <= rings; r++) {
    double polar = kPi * double(r) / rings;
    double z = radius * std::cos(polar);
    double rr = radius * std::sin(polar);
    for (int s = 0; s < segments; s++) {
      double a = 2 * kPi * double(s) / segments;
      m.vertices.push_back({rr * std::cos(a), rr * std::sin(a), z});
    }
  }
  auto idx = [&](int r, int s) { return r * segments + (s % segments); };
  for (int r = 0; r < rings; r++) {
    for (int s = 0; s < segments; s++) {
      int a = idx(r, s), b = idx(r, s + 1), c = idx(r + 1, s + 1), d = idx(r + 1, s);
      if (r != 0) m.faces.push_back({a, b, c});
      if (r != rings - 1) m.faces.push_back({a, c, d});
    }
  }
  return m;
}

TriMesh make_cylinder(double radius, double half_height, int segments) {
  TriMesh m;
  for (int s = 0; s < segments; s++) {
    double a = 2 * kPi * double(s) / segments;
    double x = radius * std::cos(a), y = radius * std::sin(a);
    m.vertices.push_back({x, y, -half_height});
    m.vertices.push_back({x, y, half_height});
  }
  int bottom_center = int(m.vertices.size());
  m.vertices.push_back({0, 0, -half_height});
  int top_center = int(m.vertices.size());
  m.vertices.push_back({0, 0, half_height});
  for (int s = 0; s < segments; s++) {
    int n = (s + 1) % segments;
    int b0 = 2 * s, t0 = 2 * s + 1, b1 = 2 * n, t1 = 2 * n + 1;
    m.faces.push_back({b0, b1, t1});
    m.faces.push_back({b0, t1, t0});
    m.faces.push_back({bottom_center, b1, b0});
    m.faces.push_back({top_center, t0, t1});
  }
  return m;
}

TriMesh make_cone(double radius, double half_height, int segments) {
  TriMesh m;
  for (int s = 0; s < segments; s++) {
    double a = 2 * kPi * double(s) / segments;
    m.vertices.push_back({radius * std::cos(a), radius * std::sin(a), -half_height});
  }
  int apex = int(m.vertices.size());
  m.vertices.push_back({0, 0, half_height});
  int base_center = int(m.vertices.size());
  m.vertices.push_back({0, 0, -half_height});
  for (int s = 0; s < segments; s++) {
    int n = (s + 1) % segments;
    m.faces.push_back({s, n, apex});
    m.faces.push_back({base_center, n, s});
  }
  return m;
}

TriMesh transform_mesh(const TriMesh& mesh, const vec3& euler, const vec3& scale,
                       const vec3& translation) {
  double cz = std::cos(euler.z), sz = std::sin(euler.z);
  double cy = std::cos(euler.y), sy = std::sin(euler.y);
  double cx = std::cos(euler.x), sx = std::sin(euler.x);
  TriMesh out = mesh;
  for (auto& v : out.vertices) {
    vec3 p{v.x * scale.x, v.y * scale.y, v.z * scale.z};
    p = {p.x * cz - p.y * sz, p.x * sz + p.y * cz, p.z};
    p = {p.x * cy + p.z * sy, p.y, -p.x * sy + p.z * cy};
    p = {p.x, p.y * cx - p.z * sx, p.y * sx + p.z * cx};
    v = p + translation;
  }
  return out;
}

TriMesh merge_meshes(const std::vector<TriMesh>& parts) {
  TriMesh out;
  bool all_albedo = !parts.empty();
  for (const auto& p : parts) all_albedo = all_albedo && p.has_albedo();
  for (const auto& p : parts) {
    int base = int(out.vertices.size());
    out.vertices.insert(out.vertices.end(), p.vertices.begin(), p.vertices.end());
    for (const auto& f : p.faces) out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
    if (all_albedo)
      out.face_albedo.insert(out.face_albedo.end(), p.face_albedo.begin(), p.face_albedo.end());
  }
  return out;
}

}  // namespace refmv
