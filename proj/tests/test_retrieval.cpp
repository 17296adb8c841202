// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "refmv/errors.hpp"
#include "refmv/primitives.hpp"
#include "refmv/retrieval.hpp"

using namespace refmv;

namespace {

ShapeDescriptor descriptor_of(const TriMesh& mesh, uint64_t seed = 1) {
  return compute_descriptor(sample_points(normalize_unit_sphere(mesh), 10000, seed));
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("descriptor: unit norm, deterministic, 80 values") {
  ShapeDescriptor d = descriptor_of(make_box());
  CHECK(int(d.values.size()) == kDescriptorSize);
  double norm = 0;
  for (double v : d.values) norm += v * v;
  CHECK(std::fabs(std::sqrt(norm) - 1.0) < 1e-6);
  ShapeDescriptor d2 = descriptor_of(make_box());
  CHECK(d.values == d2.values);
  CHECK(cosine_similarity(d, d2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("descriptor: pose-sensitive under rotation") {
  TriMesh rod = make_box({0.5, 0.05, 0.05});
  ShapeDescriptor a = descriptor_of(rod);
  ShapeDescriptor b = descriptor_of(transform_mesh(rod, {0, 0, 1.5707963}, {1, 1, 1}, {0, 0, 0}));
  CHECK(cosine_similarity(a, b) < 0.999);
}

TEST_CASE("descriptor: sphere vs rod less similar than sphere vs sphere") {
  ShapeDescriptor sphere_a = descriptor_of(make_uv_sphere(), 1);
  ShapeDescriptor sphere_b = descriptor_of(make_uv_sphere(), 2);
  ShapeDescriptor rod = descriptor_of(make_box({0.5, 0.04, 0.04}), 3);
  CHECK(cosine_similarity(sphere_a, rod) < cosine_similarity(sphere_a, sphere_b));
}

TEST_CASE("descriptor: empty cloud is an error") {
  PointCloud empty;
  CHECK_THROWS_AS(compute_descriptor(empty), ValidationError);
}

TEST_CASE("cosine_similarity: identities") {
  ShapeDescriptor a, b, c;
  a.values = {1, 0, 0};
  b.values = {0, 1, 0};
  c.values = {-1, 0, 0};
  CHECK(cosine_similarity(a, a) == 1.0);
  CHECK(cosine_similarity(a, b) == 0.0);
  CHECK(cosine_similarity(a, c) == -1.0);
}

TEST_CASE("retrieve: closed-form softmax probabilities") {
  // Two entries with similarities 1.0 and 0.5 at temperature 1.
  RetrievalIndex index;
  ShapeDescriptor q;
  q.values = {1, 0};
  ShapeDescriptor half;
  half.values = {0.5, std::sqrt(0.75)};
  index.records.push_back({"exact", "a.obj", q});
  index.records.push_back({"half", "b.obj", half});
  RetrievalResult r = retrieve(index, q, 2, 1.0, 0);
  REQUIRE(r.ranked.size() == 2);
  CHECK(r.ranked[0].id == "exact");
  CHECK(r.ranked[0].similarity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.ranked[0].probability == doctest::Approx(0.6225).epsilon(1e-3));
  CHECK(r.ranked[1].probability == doctest::Approx(0.3775).epsilon(1e-3));
  CHECK(r.ranked[0].probability + r.ranked[1].probability == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("retrieve: tiny temperature samples the argmax") {
  RetrievalIndex index;
  for (int i = 0; i < 4; i++) {
    ShapeDescriptor d;
    d.values = {std::cos(0.2 * i), std::sin(0.2 * i)};
    index.records.push_back({"m" + std::to_string(i), "m.obj", d});
  }
  ShapeDescriptor q;
  q.values = {1, 0};
  for (uint64_t seed = 0; seed < 20; seed++) {
    RetrievalResult r = retrieve(index, q, 4, 1e-6, seed);
    CHECK(r.sampled_id == "m0");
  }
}

TEST_CASE("retrieve: k clamps to index size; deterministic sampling") {
  RetrievalIndex index;
  ShapeDescriptor d;
  d.values = {1, 0};
  index.records.push_back({"only", "x.obj", d});
  RetrievalResult r = retrieve(index, d, 10, 0.05, 3);
  CHECK(r.ranked.size() == 1);
  CHECK(r.sampled_id == "only");

  RetrievalResult a = retrieve(index, d, 1, 0.05, 9);
  RetrievalResult b = retrieve(index, d, 1, 0.05, 9);
  CHECK(a.sampled_id == b.sampled_id);
}

TEST_CASE("retrieve: softmax is permutation-equivariant and sums to one") {
  Rng rng(77);
  RetrievalIndex fwd, rev;
  std::vector<ShapeDescriptor> ds;
  for (int i = 0; i < 6; i++) {
    ShapeDescriptor d;
    double a = rng.uniform(0, 3.14);
    d.values = {std::cos(a), std::sin(a)};
    ds.push_back(d);
  }
  for (int i = 0; i < 6; i++) fwd.records.push_back({"m" + std::to_string(i), "p", ds[i]});
  for (int i = 5; i >= 0; i--) rev.records.push_back({"m" + std::to_string(i), "p", ds[i]});
  ShapeDescriptor q;
  q.values = {1, 0};
  RetrievalResult rf = retrieve(fwd, q, 6, 0.3, 1);
  RetrievalResult rr = retrieve(rev, q, 6, 0.3, 1);
  double sum = 0;
  REQUIRE(rf.ranked.size() == rr.ranked.size());
  for (size_t i = 0; i < rf.ranked.size(); i++) {
    CHECK(rf.ranked[i].id == rr.ranked[i].id);
    CHECK(rf.ranked[i].probability == doctest::Approx(rr.ranked[i].probability).epsilon(1e-12));
    sum += rf.ranked[i].probability;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("build_index: records, duplicates, self-retrieval, persistence") {
  auto dir = std::filesystem::temp_directory_path() / "refmv_index_test";
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  std::vector<TriMesh> meshes = {make_box(), make_uv_sphere(), make_cylinder()};
  for (size_t i = 0; i < meshes.size(); i++) {
    std::string p = (dir / ("mesh" + std::to_string(i) + ".obj")).string();
    save_obj(p, meshes[i]);
    paths.push_back(p);
  }

  RetrievalIndex index = build_index(paths, 42);
  REQUIRE(index.records.size() == 3);
  CHECK(index.records[0].id == "mesh0");

  // Self-retrieval at rank 1 for every record.
  for (const auto& rec : index.records) {
    RetrievalResult r = retrieve(index, rec.descriptor, 1, 0.05, 0);
    CHECK(r.ranked[0].id == rec.id);
    CHECK(r.ranked[0].similarity == doctest::Approx(1.0).epsilon(1e-9));
  }

  // Rebuild determinism: bit-identical files.
  std::string f1 = temp_path("refmv_index_1.tsv");
  std::string f2 = temp_path("refmv_index_2.tsv");
  save_index(f1, index);
  save_index(f2, build_index(paths, 42));
  std::ifstream a(f1), b(f2);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(!sa.empty());

  // Round trip.
  RetrievalIndex loaded = load_index(f1);
  REQUIRE(loaded.records.size() == 3);
  for (size_t i = 0; i < 3; i++) {
    CHECK(loaded.records[i].id == index.records[i].id);
    CHECK(cosine_similarity(loaded.records[i].descriptor, index.records[i].descriptor) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }

  // Duplicate mesh under two ids -> similarity 1.
  std::vector<std::string> dup_paths = {paths[0], paths[0]};
  RetrievalIndex dup = build_index(dup_paths, 7, {"a", "b"});
  CHECK(cosine_similarity(dup.records[0].descriptor, dup.records[1].descriptor) ==
        doctest::Approx(1.0).epsilon(1e-9));

  // Unloadable path aborts with the offending path in the message.
  std::vector<std::string> bad = {paths[0], (dir / "missing.obj").string()};
  CHECK_THROWS_WITH_AS(build_index(bad, 1), doctest::Contains("missing.obj"), IoError);
}
