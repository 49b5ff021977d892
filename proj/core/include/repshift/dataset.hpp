// Copyright 2026 the repshift authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace repshift {

enum class Label : uint8_t { tumor = 0, non_tumor = 1 };

Label label_from_string(const std::string& s);
const char* label_to_string(Label l);

struct PatchRecord {
  std::string path;       // relative to the dataset root
  Label label = Label::tumor;
  std::string slide_id;   // physical slide identity; split boundary
  std::string domain_id;  // scanner / center / transform provenance
};

/// Ordered, manifest-backed collection of labeled patches.
struct PatchDataset {
  std::string root;  // directory the record paths resolve under
  std::string name;
  std::vector<PatchRecord> records;

  bool empty() const { return records.empty(); }
  size_t size() const { return records.size(); }
  std::set<std::string> slide_ids() const;
  std::string resolve(const PatchRecord& r) const;
};

struct SplitSpec {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
  uint64_t seed = 0;
};

/// Reads a `path,label,slide_id,domain_id` CSV manifest. Record order is the
/// file order; the dataset name defaults to the file stem and the root to the
/// manifest's directory. Rejects malformed rows, unknown labels, duplicate
/// paths, and paths that escape the root.
PatchDataset load_manifest(const std::string& manifest_path);

/// Writes the manifest back out in the same CSV schema.
void save_manifest(const std::string& manifest_path, const PatchDataset& ds);

/// Partitions a dataset into train/val/test with slide-disjoint membership:
/// slides are shuffled with spec.seed, then assigned greedily so each split
/// reaches its patch-count fraction. Deterministic in (ds, spec).
std::tuple<PatchDataset, PatchDataset, PatchDataset> split_by_slide(const PatchDataset& ds,
                                                                    const SplitSpec& spec);

}  // namespace repshift
