// SPDX-License-Identifier: Apache-2.0
#include "refmv/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "refmv/errors.hpp"
#include "refmv/rng.hpp"

namespace refmv {

namespace {
std::string path_stem(const std::string& path) {
  size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  size_t dot = name.find_last_of('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}
}  // namespace

RetrievalIndex build_index(const std::vector<std::string>& mesh_paths, uint64_t seed,
                           const std::vector<std::string>& ids) {
  if (!ids.empty() && ids.size() != mesh_paths.size())
    throw ValidationError("build_index: ids/paths size mismatch");
  RetrievalIndex index;
  std::set<std::string> seen;
  for (size_t i = 0; i < mesh_paths.size(); i++) {
    const std::string& path = mesh_paths[i];
    TriMesh mesh;
    try {
      mesh = normalize_unit_sphere(load_mesh(path));
    } catch (const std::exception& e) {
      throw IoError("build_index: failed on '" + path + "': " + e.what());
    }
    IndexRecord rec;
    rec.id = ids.empty() ? path_stem(path) : ids[i];
    rec.mesh_path = path;
    // Same sampling seed for every mesh: descriptors depend only on geometry,
    // so duplicate meshes map to identical descriptors.
    rec.descriptor = compute_descriptor(sample_points(mesh, kDescriptorPointCount, seed));
    if (!seen.insert(rec.id).second)
      throw ValidationError("build_index: duplicate id '" + rec.id + "'");
    index.records.push_back(std::move(rec));
  }
  return index;
}

RetrievalResult retrieve(const RetrievalIndex& index, const ShapeDescriptor& query, int k,
                         double temperature, uint64_t seed) {
  if (index.records.empty()) throw ValidationError("retrieve: empty index");
  if (k < 1) throw ValidationError("retrieve: k must be >= 1");
  if (temperature <= 0) throw ValidationError("retrieve: temperature must be > 0");
  k = std::min<int>(k, int(index.records.size()));

  std::vector<std::pair<double, const IndexRecord*>> scored;
  scored.reserve(index.records.size());
  for (const auto& rec : index.records)
    scored.emplace_back(cosine_similarity(rec.descriptor, query), &rec);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->id < b.second->id;
  });

  RetrievalResult result;
  double max_sim = scored[0].first;
  double z = 0;
  for (int i = 0; i < k; i++) z += std::exp((scored[i].first - max_sim) / temperature);
  for (int i = 0; i < k; i++) {
    RetrievalHit hit;
    hit.id = scored[i].second->id;
    hit.similarity = scored[i].first;
    hit.probability = std::exp((scored[i].first - max_sim) / temperature) / z;
    result.ranked.push_back(hit);
  }

  Rng rng(seed);
  double u = rng.uniform();
  double acc = 0;
  result.sampled_id = result.ranked.back().id;
  for (const auto& hit : result.ranked) {
    acc += hit.probability;
    if (u < acc) {
      result.sampled_id = hit.id;
      break;
    }
  }
  return result;
}

void save_index(const std::string& path, const RetrievalIndex& index) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write index: " + path);
  char buf[32];
  for (const auto& rec : index.records) {
    out << rec.id << '\t' << rec.mesh_path << '\t';
    for (size_t i = 0; i < rec.descriptor.values.size(); i++) {
      std::snprintf(buf, sizeof buf, "%.9g", rec.descriptor.values[i]);
      if (i) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

RetrievalIndex load_index(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open index: " + path);
  RetrievalIndex index;
  std::string line;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    IndexRecord rec;
    if (!std::getline(ls, rec.id, '\t') || !std::getline(ls, rec.mesh_path, '\t'))
      throw ValidationError("malformed index line in " + path);
    std::string values;
    std::getline(ls, values);
    std::istringstream vs(values);
    std::string tok;
    while (std::getline(vs, tok, ',')) rec.descriptor.values.push_back(std::stod(tok));
    if (rec.descriptor.values.empty())
      throw ValidationError("index record with no descriptor in " + path);
    if (!seen.insert(rec.id).second)
      throw ValidationError("duplicate id '" + rec.id + "' in " + path);
    index.records.push_back(std::move(rec));
  }
  if (index.records.empty()) throw ValidationError("empty index: " + path);
  return index;
}

}  // namespace refmv
