// SPDX-License-Identifier: Apache-2.0
#include "refmv/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "refmv/errors.hpp"

namespace refmv {

double triangle_area(const vec3& a, const vec3& b, const vec3& c) {
  return 0.5 * length(cross(b - a, c - a));
}

double surface_area(const TriMesh& mesh) {
  double total = 0;
  for (const auto& f : mesh.faces)
    total += triangle_area(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
  return total;
}

vec3 face_normal(const TriMesh& mesh, int face) {
  const auto& f = mesh.faces[face];
  vec3 n = cross(mesh.vertices[f[1]] - mesh.vertices[f[0]],
                 mesh.vertices[f[2]] - mesh.vertices[f[0]]);
  double len = length(n);
  return len > 0 ? n / len : vec3{0, 0, 1};
}

namespace {

// "3", "3/1", "3//2", "-1" -> vertex index (0-based).
int parse_face_index(const std::string& token, size_t vertex_count, const std::string& origin) {
  size_t slash = token.find('/');
  std::string head = slash == std::string::npos ? token : token.substr(0, slash);
  long idx = 0;
  try {
    idx = std::stol(head);
  } catch (...) {
    throw ValidationError("bad face index '" + token + "' in " + origin);
  }
  long resolved = idx > 0 ? idx - 1 : long(vertex_count) + idx;
  if (resolved < 0 || size_t(resolved) >= vertex_count)
    throw ValidationError("face index out of range in " + origin);
  return int(resolved);
}

}  // namespace

TriMesh parse_obj(const std::string& text, const std::string& origin) {
  TriMesh mesh;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      vec3 p;
      if (!(ls >> p.x >> p.y >> p.z)) throw ValidationError("bad vertex record in " + origin);
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      while (ls >> tok) poly.push_back(parse_face_index(tok, mesh.vertices.size(), origin));
      if (poly.size() < 3) throw ValidationError("face with <3 vertices in " + origin);
      for (size_t i = 1; i + 1 < poly.size(); i++)
        mesh.faces.push_back({poly[0], poly[i], poly[i + 1]});
    }
    // Other records (vn, vt, usemtl, ...) are ignored.
  }

  // Drop degenerate faces.
  std::vector<std::array<int, 3>> kept;
  kept.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) {
    double area = triangle_area(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
    if (area > 0) kept.push_back(f);
  }
  mesh.faces = std::move(kept);
  if (mesh.faces.empty()) throw ValidationError("mesh has no non-degenerate faces: " + origin);
  return mesh;
}

TriMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_obj(buf.str(), path);
}

void save_obj(const std::string& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh: " + path);
  char line[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(line, sizeof line, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
    out << line;
  }
  for (const auto& f : mesh.faces) {
    std::snprintf(line, sizeof line, "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
    out << line;
  }
  if (!out) throw IoError("write failed: " + path);
}

TriMesh normalize_unit_sphere(const TriMesh& mesh) {
  if (mesh.faces.empty()) throw ValidationError("normalize_unit_sphere: empty mesh");
  vec3 lo = mesh.vertices[0], hi = mesh.vertices[0];
  for (const auto& v : mesh.vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
  }
  vec3 center = (lo + hi) * 0.5;
  double max_norm = 0;
  for (const auto& v : mesh.vertices) max_norm = std::max(max_norm, length(v - center));
  if (max_norm <= 0) throw ValidationError("normalize_unit_sphere: zero-extent mesh");

  TriMesh out = mesh;
  for (auto& v : out.vertices) v = (v - center) / max_norm;
  return out;
}

PointCloud sample_points(const TriMesh& mesh, int n, uint64_t seed) {
  if (n < 1) throw ValidationError("sample_points: n must be >= 1");
  if (mesh.faces.empty()) throw ValidationError("sample_points: empty mesh");

  std::vector<double> cum(mesh.faces.size());
  double total = 0;
  for (size_t i = 0; i < mesh.faces.size(); i++) {
    const auto& f = mesh.faces[i];
    total += triangle_area(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
    cum[i] = total;
  }
  if (total <= 0) throw ValidationError("sample_points: zero total area");

  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(n);
  for (int i = 0; i < n; i++) {
    double u = rng.uniform() * total;
    size_t fi = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
    if (fi >= mesh.faces.size()) fi = mesh.faces.size() - 1;
    const auto& f = mesh.faces[fi];
    // Uniform barycentric placement.
    double r1 = std::sqrt(rng.uniform());
    double r2 = rng.uniform();
    double a = 1 - r1, b = r1 * (1 - r2), c = r1 * r2;
    cloud.points.push_back(mesh.vertices[f[0]] * a + mesh.vertices[f[1]] * b +
                           mesh.vertices[f[2]] * c);
  }
  return cloud;
}

}  // namespace refmv
