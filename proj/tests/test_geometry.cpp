// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "refmv/camera.hpp"
#include "refmv/errors.hpp"
#include "refmv/mesh.hpp"
#include "refmv/primitives.hpp"
#include "refmv/raster.hpp"
#include "support/raycast_oracle.hpp"

using namespace refmv;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  auto path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("parse_obj: single triangle") {
  TriMesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  CHECK(m.vertices.size() == 3);
  CHECK(m.faces.size() == 1);
  CHECK(m.faces[0] == std::array<int, 3>{0, 1, 2});
}

TEST_CASE("parse_obj: quad fan split") {
  TriMesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  CHECK(m.faces.size() == 2);
  CHECK(m.faces[0] == std::array<int, 3>{0, 1, 2});
  CHECK(m.faces[1] == std::array<int, 3>{0, 2, 3});
}

TEST_CASE("parse_obj: degenerate faces dropped") {
  TriMesh m = parse_obj(
      "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
      "f 1 2 3\nf 1 1 2\nf 1 1 2\n");
  CHECK(m.faces.size() == 1);
}

TEST_CASE("parse_obj: negative and slashed indices") {
  TriMesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3/1 -2/2 -1/3\n");
  CHECK(m.faces[0] == std::array<int, 3>{0, 1, 2});
}

TEST_CASE("parse_obj: errors") {
  CHECK_THROWS_AS(parse_obj("v 0 0 0\n"), ValidationError);           // no faces
  CHECK_THROWS_AS(parse_obj("v 0 0 0\nf 1 1 1\n"), ValidationError);  // only degenerate
  CHECK_THROWS_AS(load_mesh("/nonexistent/file.obj"), IoError);
}

TEST_CASE("save/load round trip") {
  TriMesh box = make_box();
  auto path = write_temp("refmv_box.obj", "");
  save_obj(path, box);
  TriMesh back = load_mesh(path);
  REQUIRE(back.vertices.size() == box.vertices.size());
  REQUIRE(back.faces.size() == box.faces.size());
  for (size_t i = 0; i < box.vertices.size(); i++)
    CHECK(length(back.vertices[i] - box.vertices[i]) < 1e-9);
}

TEST_CASE("normalize_unit_sphere: cube corners") {
  TriMesh cube = make_box({1, 1, 1});
  TriMesh n = normalize_unit_sphere(cube);
  double inv = 1.0 / std::sqrt(3.0);
  for (const auto& v : n.vertices) {
    CHECK(std::fabs(length(v) - 1.0) < 1e-12);
    CHECK(std::fabs(std::fabs(v.x) - inv) < 1e-12);
  }
}

TEST_CASE("normalize_unit_sphere: analytic triangle") {
  TriMesh m = parse_obj("v 0 0 0\nv 2 0 0\nv 0 2 0\nf 1 2 3\n");
  TriMesh n = normalize_unit_sphere(m);
  double r = 1.0 / std::sqrt(2.0);
  CHECK(length(n.vertices[0] - vec3{-r, -r, 0}) < 1e-9);
  CHECK(length(n.vertices[1] - vec3{r, -r, 0}) < 1e-9);
  CHECK(length(n.vertices[2] - vec3{-r, r, 0}) < 1e-9);
}

TEST_CASE("normalize_unit_sphere: idempotent and scale-equivariant") {
  Rng rng(7);
  for (int trial = 0; trial < 20; trial++) {
    TriMesh m = transform_mesh(make_uv_sphere(0.5, 6, 9),
                               {rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 3)},
                               {rng.uniform(0.2, 2), rng.uniform(0.2, 2), rng.uniform(0.2, 2)},
                               {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    TriMesh n1 = normalize_unit_sphere(m);
    TriMesh n2 = normalize_unit_sphere(n1);
    double s = rng.uniform(0.1, 10);
    TriMesh ns = normalize_unit_sphere(transform_mesh(m, {0, 0, 0}, {s, s, s}, {0, 0, 0}));
    double max_norm = 0;
    for (size_t i = 0; i < n1.vertices.size(); i++) {
      max_norm = std::max(max_norm, length(n1.vertices[i]));
      CHECK(length(n2.vertices[i] - n1.vertices[i]) < 1e-6);
      CHECK(length(ns.vertices[i] - n1.vertices[i]) < 1e-9);
    }
    CHECK(std::fabs(max_norm - 1.0) < 1e-6);
  }
}

TEST_CASE("normalize_unit_sphere: zero extent is an error") {
  TriMesh m;
  m.vertices = {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
  m.faces = {{0, 1, 2}};
  CHECK_THROWS_AS(normalize_unit_sphere(m), ValidationError);
}

TEST_CASE("sample_points: area weighting on two triangles") {
  // Areas 1 and 3.
  TriMesh m;
  m.vertices = {{0, 0, 0}, {2, 0, 0}, {0, 1, 0}, {10, 0, 0}, {12, 0, 0}, {10, 3, 0}};
  m.faces = {{0, 1, 2}, {3, 4, 5}};
  PointCloud cloud = sample_points(m, 40000, 11);
  int second = 0;
  for (const auto& p : cloud.points)
    if (p.x >= 9) second++;
  CHECK(second >= 29500);
  CHECK(second <= 30500);
}

TEST_CASE("sample_points: points on the source triangle") {
  TriMesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  PointCloud cloud = sample_points(m, 500, 3);
  for (const auto& p : cloud.points) {
    CHECK(std::fabs(p.z) < 1e-9);
    CHECK(p.x >= -1e-9);
    CHECK(p.y >= -1e-9);
    CHECK(p.x + p.y <= 1 + 1e-9);
  }
}

TEST_CASE("sample_points: deterministic and validated") {
  TriMesh m = make_box();
  PointCloud a = sample_points(m, 1000, 42);
  PointCloud b = sample_points(m, 1000, 42);
  REQUIRE(a.points.size() == b.points.size());
  for (size_t i = 0; i < a.points.size(); i++) CHECK(length(a.points[i] - b.points[i]) == 0.0);
  CHECK_THROWS_AS(sample_points(m, 0, 1), ValidationError);
}

TEST_CASE("sample_points: chi-square fit against face areas") {
  // 10 faces with distinct areas; chi-square with 9 dof at p=0.01 -> 21.666.
  TriMesh m;
  for (int i = 0; i < 10; i++) {
    double s = 0.3 + 0.25 * i;
    int base = int(m.vertices.size());
    m.vertices.push_back({double(i * 3), 0, 0});
    m.vertices.push_back({double(i * 3) + s, 0, 0});
    m.vertices.push_back({double(i * 3), s, 0});
    m.faces.push_back({base, base + 1, base + 2});
  }
  const int n = 100000;
  PointCloud cloud = sample_points(m, n, 5);
  std::vector<int> counts(10, 0);
  for (const auto& p : cloud.points) counts[std::min(9, int(p.x / 3.0))]++;
  double total_area = surface_area(m);
  double chi2 = 0;
  for (int i = 0; i < 10; i++) {
    const auto& f = m.faces[i];
    double e = n * triangle_area(m.vertices[f[0]], m.vertices[f[1]], m.vertices[f[2]]) / total_area;
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
  }
  CHECK(chi2 < 21.666);
}

TEST_CASE("make_view_protocol: pose table at phi=0") {
  ViewProtocol p = make_view_protocol(0);
  const double az[6] = {30, 90, 150, 210, 270, 330};
  const double el[6] = {20, -10, 20, -10, 20, -10};
  for (int i = 0; i < 6; i++) {
    CHECK(p.target_poses[i].azimuth_deg == az[i]);
    CHECK(p.target_poses[i].elevation_deg == el[i]);
    CHECK(p.target_poses[i].fov_deg == 30.0);
    CHECK(p.target_poses[i].distance == 1.866);
  }
}

TEST_CASE("make_view_protocol: azimuth wraps modulo 360") {
  ViewProtocol p = make_view_protocol(350);
  CHECK(p.target_poses[0].azimuth_deg == doctest::Approx(20).epsilon(1e-12));
  ViewProtocol q = make_view_protocol(123.5);
  for (int i = 0; i < 6; i++) {
    CHECK(q.target_poses[i].azimuth_deg >= 0);
    CHECK(q.target_poses[i].azimuth_deg < 360);
  }
}

TEST_CASE("render_ccm: background rule and mask agreement") {
  TriMesh mesh = normalize_unit_sphere(make_uv_sphere());
  Image img, mask;
  render_ccm(mesh, make_view_protocol(0).target_poses[0], 32, img, mask);
  int fg = 0;
  for (int y = 0; y < 32; y++)
    for (int x = 0; x < 32; x++) {
      if (mask.at(x, y, 0) == 0.0) {
        CHECK(img.at(x, y, 0) == 1.0);
        CHECK(img.at(x, y, 1) == 1.0);
        CHECK(img.at(x, y, 2) == 1.0);
      } else {
        fg++;
      }
    }
  CHECK(fg > 0);
}

TEST_CASE("render_ccm: decoded coordinates stay in the unit ball") {
  Rng rng(3);
  TriMesh mesh = normalize_unit_sphere(
      transform_mesh(make_cone(), {rng.uniform(0, 3), 0.3, 0.9}, {1, 1, 1}, {0, 0, 0}));
  for (const auto& pose : make_view_protocol(77).target_poses) {
    Image img, mask;
    render_ccm(mesh, pose, 48, img, mask);
    for (int y = 0; y < 48; y++)
      for (int x = 0; x < 48; x++) {
        if (mask.at(x, y, 0) == 0.0) continue;
        vec3 c{2 * img.at(x, y, 0) - 1, 2 * img.at(x, y, 1) - 1, 2 * img.at(x, y, 2) - 1};
        CHECK(length(c) <= 1.0 + 1e-3);
      }
  }
}

TEST_CASE("render_ccm: azimuth periodicity") {
  TriMesh mesh = normalize_unit_sphere(make_cylinder());
  Image a, am, b, bm;
  render_ccm(mesh, CameraPose(25, 15, 1.866, 30), 24, a, am);
  render_ccm(mesh, CameraPose(25 + 360, 15, 1.866, 30), 24, b, bm);
  CHECK(a.px == b.px);
  CHECK(am.px == bm.px);
}

TEST_CASE("render_ccm: ray-cast oracle agreement on interior pixels") {
  Rng rng(19);
  for (int trial = 0; trial < 6; trial++) {
    TriMesh base;
    switch (trial % 4) {
      case 0: base = make_uv_sphere(0.5, 7, 10); break;
      case 1: base = make_box({0.4, 0.55, 0.3}); break;
      case 2: base = make_cylinder(); break;
      default: base = make_cone(); break;
    }
    TriMesh mesh = normalize_unit_sphere(
        transform_mesh(base, {rng.uniform(0, 6.28), rng.uniform(0, 6.28), rng.uniform(0, 6.28)},
                       {1, 1, 1}, {0, 0, 0}));
    REQUIRE(mesh.faces.size() <= 200);
    CameraPose pose(rng.uniform(0, 360), rng.uniform(-10, 40), 1.866, 30);
    const int res = 64;
    Image img, mask;
    render_ccm(mesh, pose, res, img, mask);

    int tested = 0, agree = 0;
    for (int y = 1; y < res - 1; y++) {
      for (int x = 1; x < res - 1; x++) {
        if (mask.at(x, y, 0) == 0.0) continue;
        bool interior = true;  // edge pixels exempt
        for (int dy = -1; dy <= 1 && interior; dy++)
          for (int dx = -1; dx <= 1; dx++)
            if (mask.at(x + dx, y + dy, 0) == 0.0) {
              interior = false;
              break;
            }
        if (!interior) continue;
        auto hit = refmv::testing::cast_pixel_ray(mesh, pose, res, x, y);
        tested++;
        if (!hit) continue;
        double err = 0;
        vec3 expect = (hit->point + vec3{1, 1, 1}) * 0.5;
        err = std::max({std::fabs(expect.x - img.at(x, y, 0)), std::fabs(expect.y - img.at(x, y, 1)),
                        std::fabs(expect.z - img.at(x, y, 2))});
        if (err <= 2.0 / 255.0) agree++;
      }
    }
    REQUIRE(tested > 20);
    CHECK(double(agree) / tested >= 0.99);
  }
}

TEST_CASE("render_target: behind-camera mesh gives a white image") {
  TriMesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  // Push the triangle far beyond the camera (distance 1.866 toward +x at azimuth 0).
  TriMesh far = transform_mesh(m, {0, 0, 0}, {1, 1, 1}, {10, 0, 0});
  Image img = render_target(far, CameraPose(0, 0, 1.866, 30), 16);
  for (double v : img.px) CHECK(v == 1.0);
}

TEST_CASE("render_target: deterministic") {
  TriMesh mesh = normalize_unit_sphere(make_box());
  mesh.face_albedo.assign(mesh.faces.size(), {0.8, 0.3, 0.2});
  Image a = render_target(mesh, CameraPose(40, 12, 1.866, 30), 32);
  Image b = render_target(mesh, CameraPose(40, 12, 1.866, 30), 32);
  CHECK(a.px == b.px);
}

TEST_CASE("render_target: headlight brightest where the surface faces the camera") {
  TriMesh mesh = normalize_unit_sphere(make_uv_sphere(0.5, 16, 24));
  mesh.face_albedo.assign(mesh.faces.size(), {1.0, 1.0, 1.0});
  CameraPose pose(0, 0, 1.866, 30);
  const int res = 65;
  Image img = render_target(mesh, pose, res);

  double best = -1;
  int bx = -1, by = -1;
  for (int y = 0; y < res; y++)
    for (int x = 0; x < res; x++) {
      bool bg = img.at(x, y, 0) == 1.0 && img.at(x, y, 1) == 1.0 && img.at(x, y, 2) == 1.0;
      if (bg) continue;
      if (img.at(x, y, 0) > best) {
        best = img.at(x, y, 0);
        bx = x;
        by = y;
      }
    }
  // The camera-facing point projects to the image center.
  CHECK(std::abs(bx - res / 2) <= 2);
  CHECK(std::abs(by - res / 2) <= 2);

  // Cross-check shading against the ray-cast oracle at the center pixel.
  auto hit = refmv::testing::cast_pixel_ray(mesh, pose, res, res / 2, res / 2);
  REQUIRE(hit.has_value());
  CameraFrame frame(pose);
  vec3 l = normalize(frame.position - hit->point);
  vec3 n = face_normal(mesh, hit->face);
  double lit = 0.15 + 0.85 * std::fabs(dot(n, l));
  CHECK(img.at(res / 2, res / 2, 0) == doctest::Approx(lit).epsilon(0.02));
}
