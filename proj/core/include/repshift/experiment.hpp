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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "repshift/augment.hpp"
#include "repshift/config.hpp"
#include "repshift/report.hpp"
#include "repshift/train.hpp"

namespace repshift {

/// Grid description: which models, which data-preparation variants, which
/// test domains, how many seeds. Transform names: "original", "color_aug",
/// "stain_norm", or "pretranslated:<manifest.csv>" for directories produced
/// by an external image-to-image translator.
struct ExperimentConfig {
  std::vector<std::string> models{"simple_cnn"};
  std::vector<std::string> transforms{"original"};
  std::string train_manifest;
  std::vector<std::string> test_manifests;
  std::string reference_patch;  // required by stain_norm cells
  std::vector<uint64_t> seeds{1, 2, 3};
  double val_fraction = 0.15;
  double test_fraction = 0.15;
  TrainConfig train_template;
  HsvJitterConfig hsv;  // color_aug cells
  GeoAugConfig geo;     // all cells
  int input_size = 96;
  int workers = 1;
  bool deterministic = false;
  std::string out_dir = "out";

  static ExperimentConfig from_config(const KeyValueConfig& cfg);
  static std::string schema();
  void validate() const;
};

/// Result of one (model, transform, seed) training: accuracy and shift per
/// test domain. A failed cell carries its error and empty maps.
struct CellResult {
  std::string model;
  std::string transform;
  uint64_t seed = 0;
  double val_accuracy = 0.0;
  int reference_patch_count = 0;  // held-out patches feeding the reference activations
  std::map<std::string, double> accuracy_by_domain;
  std::map<std::string, double> repshift_by_domain;
  std::string error;  // empty on success
};

struct AggregateCell {
  std::string model;
  std::string transform;
  std::string domain;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;  // only meaningful when n_seeds >= 2
  double repshift_mean = 0.0;
  double repshift_std = 0.0;
  int n_seeds = 0;
};

struct ReportBundle {
  std::vector<CellResult> cells;
  std::vector<std::pair<std::string, std::string>> files;  // path, crc32 hex
  std::string config_echo;                                 // provenance
  std::vector<uint64_t> seeds;

  std::vector<AggregateCell> aggregate() const;
  std::vector<ReportPoint> report_points() const;

  std::string to_json() const;
  static ReportBundle from_json(const std::string& json_text);
  void save(const std::string& path) const;
  static ReportBundle load(const std::string& path);
};

/// Runs every (model, transform, seed) cell: slide-disjoint split of the
/// training domain, training with the transform's augmentation pipeline,
/// accuracy on every test domain, reference activations from the held-out
/// same-domain split, target activations and shift per domain. Artifacts
/// land under out_dir/<model>/<transform>/<seed>/; a failing cell is
/// recorded and does not abort its siblings.
ReportBundle run_experiment_grid(const ExperimentConfig& cfg);

}  // namespace repshift
