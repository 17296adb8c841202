// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "refmv/descriptor.hpp"

namespace refmv {

struct IndexRecord {
  std::string id;
  std::string mesh_path;
  ShapeDescriptor descriptor;
};

// Immutable after build; ids unique.
struct RetrievalIndex {
  std::vector<IndexRecord> records;
};

struct RetrievalHit {
  std::string id;
  double similarity = 0;
  double probability = 0;
};

struct RetrievalResult {
  std::vector<RetrievalHit> ranked;  // top-k by similarity desc, ties by id
  std::string sampled_id;            // drawn from softmax(similarity/temperature)
};

constexpr double kDefaultRetrievalTemperature = 0.05;

// Full pipeline per mesh: load -> normalize -> sample 10K points -> descriptor.
// Ids are derived from the file stem unless explicit ids are given.
RetrievalIndex build_index(const std::vector<std::string>& mesh_paths, uint64_t seed,
                           const std::vector<std::string>& ids = {});

RetrievalResult retrieve(const RetrievalIndex& index, const ShapeDescriptor& query, int k,
                         double temperature, uint64_t seed);

// Text persistence: one record per line, id<TAB>path<TAB>comma-joined values
// at 9 significant digits.
void save_index(const std::string& path, const RetrievalIndex& index);
RetrievalIndex load_index(const std::string& path);

}  // namespace refmv
