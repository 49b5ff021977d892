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

#include "repshift/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "repshift/error.hpp"
#include "repshift/rng.hpp"

namespace fs = std::filesystem;

namespace repshift {

Label label_from_string(const std::string& s) {
  if (s == "tumor") return Label::tumor;
  if (s == "non_tumor") return Label::non_tumor;
  throw Error(ErrorCode::unknown_label, "label must be tumor or non_tumor, got '" + s + "'");
}

const char* label_to_string(Label l) {
  return l == Label::tumor ? "tumor" : "non_tumor";
}

std::set<std::string> PatchDataset::slide_ids() const {
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.slide_id);
  return ids;
}

std::string PatchDataset::resolve(const PatchRecord& r) const {
  return (fs::path(root) / r.path).string();
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// Lexically checks that a relative path stays under the dataset root.
bool escapes_root(const std::string& rel) {
  if (rel.empty()) return true;
  fs::path p(rel);
  if (p.is_absolute()) return true;
  int depth = 0;
  for (const auto& part : p) {
    if (part == "..") {
      if (--depth < 0) return true;
    } else if (part != ".") {
      ++depth;
    }
  }
  return false;
}

}  // namespace

PatchDataset load_manifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open manifest: " + manifest_path);

  PatchDataset ds;
  const fs::path mp(manifest_path);
  ds.root = mp.has_parent_path() ? mp.parent_path().string() : ".";
  ds.name = mp.stem().string();

  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::parse_error, "manifest has no header row: " + manifest_path);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "path,label,slide_id,domain_id") {
    throw Error(ErrorCode::parse_error,
                "manifest header must be 'path,label,slide_id,domain_id', got '" + line + "'");
  }

  std::unordered_set<std::string> seen_paths;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_row(line);
    if (fields.size() != 4) {
      throw Error(ErrorCode::parse_error, "manifest row " + std::to_string(row) + " has " +
                                              std::to_string(fields.size()) + " columns, expected 4");
    }
    PatchRecord r;
    r.path = fields[0];
    r.label = label_from_string(fields[1]);
    r.slide_id = fields[2];
    r.domain_id = fields[3];
    if (r.path.empty() || escapes_root(r.path)) {
      throw Error(ErrorCode::parse_error,
                  "manifest row " + std::to_string(row) + ": path does not resolve under root");
    }
    if (r.slide_id.empty() || r.domain_id.empty()) {
      throw Error(ErrorCode::parse_error,
                  "manifest row " + std::to_string(row) + ": slide_id and domain_id must be non-empty");
    }
    if (!seen_paths.insert(r.path).second) {
      throw Error(ErrorCode::duplicate_path, "duplicate manifest entry: " + r.path);
    }
    ds.records.push_back(std::move(r));
  }
  return ds;
}

void save_manifest(const std::string& manifest_path, const PatchDataset& ds) {
  std::ofstream out(manifest_path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write manifest: " + manifest_path);
  out << "path,label,slide_id,domain_id\n";
  for (const auto& r : ds.records) {
    out << r.path << ',' << label_to_string(r.label) << ',' << r.slide_id << ',' << r.domain_id << '\n';
  }
  if (!out) throw Error(ErrorCode::io_error, "write failed: " + manifest_path);
}

std::tuple<PatchDataset, PatchDataset, PatchDataset> split_by_slide(const PatchDataset& ds,
                                                                    const SplitSpec& spec) {
  const double sum = spec.train + spec.val + spec.test;
  if (spec.train < 0 || spec.val < 0 || spec.test < 0 || std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::invalid_config, "split fractions must be non-negative and sum to 1");
  }

  // Slides in first-appearance order, then shuffled with the split seed.
  std::vector<std::string> slides;
  std::map<std::string, std::vector<size_t>> by_slide;
  for (size_t i = 0; i < ds.records.size(); ++i) {
    const auto& id = ds.records[i].slide_id;
    auto [it, inserted] = by_slide.try_emplace(id);
    if (inserted) slides.push_back(id);
    it->second.push_back(i);
  }

  const double fractions[3] = {spec.train, spec.val, spec.test};
  size_t wanted_splits = 0;
  for (double f : fractions) {
    if (f > 0) ++wanted_splits;
  }
  if (slides.size() < wanted_splits) {
    throw Error(ErrorCode::too_few_slides,
                "need at least " + std::to_string(wanted_splits) + " slides for " +
                    std::to_string(wanted_splits) + " non-empty splits, have " +
                    std::to_string(slides.size()));
  }

  Rng rng(spec.seed);
  rng.shuffle(slides);

  const double total = static_cast<double>(ds.records.size());
  std::vector<size_t> member[3];
  size_t counts[3] = {0, 0, 0};
  for (const auto& slide : slides) {
    const auto& idx = by_slide[slide];
    int target = 2;
    for (int k = 0; k < 2; ++k) {
      if (fractions[k] > 0 && static_cast<double>(counts[k]) < fractions[k] * total) {
        target = k;
        break;
      }
    }
    if (target == 2 && fractions[2] == 0) {
      // Test split disabled; spill into the last enabled split.
      target = fractions[1] > 0 ? 1 : 0;
    }
    counts[target] += idx.size();
    member[target].insert(member[target].end(), idx.begin(), idx.end());
  }

  auto build = [&](int k, const char* suffix) {
    PatchDataset out;
    out.root = ds.root;
    out.name = ds.name + suffix;
    std::sort(member[k].begin(), member[k].end());
    out.records.reserve(member[k].size());
    for (size_t i : member[k]) out.records.push_back(ds.records[i]);
    return out;
  };
  return {build(0, "_train"), build(1, "_val"), build(2, "_test")};
}

}  // namespace repshift
