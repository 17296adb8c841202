// SPDX-License-Identifier: Apache-2.0
#include "refmv/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace refmv {

namespace {

constexpr double kNearPlane = 0.05;

struct ClipVertex {
  vec3 cam;        // camera-space position
  vec3 canonical;  // attribute carried through clipping
};

// Clips a triangle against z <= -near, appending 0..2 triangles.
void clip_near(const ClipVertex tri[3], std::vector<std::array<ClipVertex, 3>>& out) {
  ClipVertex poly[4];
  int count = 0;
  for (int i = 0; i < 3; i++) {
    const ClipVertex& a = tri[i];
    const ClipVertex& b = tri[(i + 1) % 3];
    bool a_in = a.cam.z <= -kNearPlane;
    bool b_in = b.cam.z <= -kNearPlane;
    if (a_in) poly[count++] = a;
    if (a_in != b_in) {
      double t = (-kNearPlane - a.cam.z) / (b.cam.z - a.cam.z);
      poly[count++] = {a.cam + (b.cam - a.cam) * t, a.canonical + (b.canonical - a.canonical) * t};
    }
  }
  for (int i = 1; i + 1 < count; i++) out.push_back({poly[0], poly[i], poly[i + 1]});
}

struct Shader {
  virtual ~Shader() = default;
  // `p` is the canonical-space surface point, `face` the source triangle.
  virtual vec3 shade(const vec3& p, int face) const = 0;
};

void rasterize(const TriMesh& mesh, const CameraPose& pose, int resolution, const Shader& shader,
               Image& image, Image* mask) {
  image = Image(resolution, resolution, 3, 1.0);  // white background
  if (mask) *mask = Image(resolution, resolution, 1, 0.0);
  std::vector<double> zbuf(size_t(resolution) * resolution,
                           std::numeric_limits<double>::infinity());
  std::vector<int> facebuf(size_t(resolution) * resolution, -1);
  std::vector<vec3> pointbuf(size_t(resolution) * resolution);

  CameraFrame frame(pose);
  std::vector<vec3> cam(mesh.vertices.size());
  for (size_t i = 0; i < mesh.vertices.size(); i++) cam[i] = frame.to_camera(mesh.vertices[i]);

  std::vector<std::array<ClipVertex, 3>> clipped;
  for (size_t fi = 0; fi < mesh.faces.size(); fi++) {
    const auto& f = mesh.faces[fi];
    ClipVertex tri[3];
    for (int k = 0; k < 3; k++) tri[k] = {cam[f[k]], mesh.vertices[f[k]]};
    clipped.clear();
    clip_near(tri, clipped);

    for (const auto& ct : clipped) {
      double sx[3], sy[3], invw[3];
      vec3 attr_over_w[3];
      for (int k = 0; k < 3; k++) {
        frame.project(ct[k].cam, resolution, sx[k], sy[k]);
        double w = -ct[k].cam.z;
        invw[k] = 1.0 / w;
        attr_over_w[k] = ct[k].canonical * invw[k];
      }

      int i0 = 0, i1 = 1, i2 = 2;
      double area2 = (sx[i1] - sx[i0]) * (sy[i2] - sy[i0]) - (sy[i1] - sy[i0]) * (sx[i2] - sx[i0]);
      if (area2 == 0) continue;
      if (area2 < 0) {
        std::swap(i1, i2);
        area2 = -area2;
      }
      double x0 = sx[i0], y0 = sy[i0], x1 = sx[i1], y1 = sy[i1], x2 = sx[i2], y2 = sy[i2];

      int min_x = std::max(0, int(std::floor(std::min({x0, x1, x2}))));
      int max_x = std::min(resolution - 1, int(std::ceil(std::max({x0, x1, x2}))));
      int min_y = std::max(0, int(std::floor(std::min({y0, y1, y2}))));
      int max_y = std::min(resolution - 1, int(std::ceil(std::max({y0, y1, y2}))));
      if (min_x > max_x || min_y > max_y) continue;

      // Top-left fill rule: a boundary pixel belongs to the triangle whose
      // edge is horizontal-going-right or going-up in screen space.
      auto edge_accepts_zero = [](double dx, double dy) {
        return (dy == 0 && dx > 0) || dy < 0;
      };
      bool tl01 = edge_accepts_zero(x1 - x0, y1 - y0);
      bool tl12 = edge_accepts_zero(x2 - x1, y2 - y1);
      bool tl20 = edge_accepts_zero(x0 - x2, y0 - y2);

      for (int py = min_y; py <= max_y; py++) {
        double cy = py + 0.5;
        for (int px = min_x; px <= max_x; px++) {
          double cx = px + 0.5;
          double e01 = (x1 - x0) * (cy - y0) - (y1 - y0) * (cx - x0);  // weight of vertex 2
          double e12 = (x2 - x1) * (cy - y1) - (y2 - y1) * (cx - x1);  // weight of vertex 0
          double e20 = (x0 - x2) * (cy - y2) - (y0 - y2) * (cx - x2);  // weight of vertex 1
          bool in = (e01 > 0 || (e01 == 0 && tl01)) && (e12 > 0 || (e12 == 0 && tl12)) &&
                    (e20 > 0 || (e20 == 0 && tl20));
          if (!in) continue;

          double l0 = e12 / area2, l1 = e20 / area2, l2 = e01 / area2;
          double inv_w = l0 * invw[i0] + l1 * invw[i1] + l2 * invw[i2];
          double depth = 1.0 / inv_w;
          size_t pix = size_t(py) * resolution + px;
          if (depth >= zbuf[pix]) continue;
          zbuf[pix] = depth;
          vec3 p = (attr_over_w[i0] * l0 + attr_over_w[i1] * l1 + attr_over_w[i2] * l2) * depth;
          pointbuf[pix] = p;
          facebuf[pix] = int(fi);
        }
      }
    }
  }

  for (int py = 0; py < resolution; py++) {
    for (int px = 0; px < resolution; px++) {
      size_t pix = size_t(py) * resolution + px;
      if (facebuf[pix] < 0) continue;
      vec3 color = shader.shade(pointbuf[pix], facebuf[pix]);
      image.at(px, py, 0) = std::clamp(color.x, 0.0, 1.0);
      image.at(px, py, 1) = std::clamp(color.y, 0.0, 1.0);
      image.at(px, py, 2) = std::clamp(color.z, 0.0, 1.0);
      if (mask) mask->at(px, py, 0) = 1.0;
    }
  }
}

struct CcmShader : Shader {
  vec3 shade(const vec3& p, int) const override {
    return {(p.x + 1) * 0.5, (p.y + 1) * 0.5, (p.z + 1) * 0.5};
  }
};

struct LambertShader : Shader {
  const TriMesh& mesh;
  vec3 eye;
  explicit LambertShader(const TriMesh& m, const vec3& e) : mesh(m), eye(e) {}

  vec3 shade(const vec3& p, int face) const override {
    vec3 albedo = mesh.has_albedo() ? mesh.face_albedo[face] : vec3{0.7, 0.7, 0.7};
    vec3 l = normalize(eye - p);
    vec3 n = face_normal(mesh, face);
    double d = dot(n, l);
    if (d < 0) d = -d;  // two-sided
    double lit = 0.15 + 0.85 * d;
    return albedo * lit;
  }
};

}  // namespace

void render_ccm(const TriMesh& mesh, const CameraPose& pose, int resolution, Image& image,
                Image& mask) {
  CcmShader shader;
  rasterize(mesh, pose, resolution, shader, image, &mask);
}

Image render_target(const TriMesh& mesh, const CameraPose& pose, int resolution) {
  CameraFrame frame(pose);
  LambertShader shader(mesh, frame.position);
  Image image;
  rasterize(mesh, pose, resolution, shader, image, nullptr);
  return image;
}

CCMSet render_ccm_set(const TriMesh& mesh, const ViewProtocol& protocol, int resolution) {
  CCMSet set;
  set.resolution = resolution;
  for (int i = 0; i < 6; i++)
    render_ccm(mesh, protocol.target_poses[i], resolution, set.views[i], set.masks[i]);
  return set;
}

}  // namespace refmv
