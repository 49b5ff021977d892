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
#include <string>
#include <vector>

#include "repshift/augment.hpp"
#include "repshift/dataset.hpp"
#include "repshift/loader.hpp"
#include "repshift/models.hpp"

namespace repshift {

struct TrainConfig {
  int epochs = 30;
  int batch_size = 64;
  double learning_rate = 0.01;
  double momentum = 0.9;
  uint64_t seed = 0;
  std::vector<AugmentStep> augmentations;  // training patches only
  int early_stop_patience = 5;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;  // 1-based; 0 when no validation data
};

void save_history_csv(const std::string& path, const TrainHistory& history);

/// Momentum-SGD training on two-class cross-entropy. Augmentations apply to
/// training patches only, with per-(epoch, record) derived seeds so results
/// do not depend on batch assembly order. Keeps the weights of the best
/// validation epoch; stops early after `early_stop_patience` epochs without
/// improvement. Verifies train/val slide-disjointness up front.
TrainHistory train(TrainedModel& model, const PatchDataset& train_ds, const PatchDataset& val_ds,
                   const TrainConfig& cfg, ImageProvider& images);

struct EvalResult {
  double accuracy = 0.0;
  size_t n = 0;
  // domain_id -> (correct, total)
  std::map<std::string, std::pair<size_t, size_t>> per_domain;

  std::map<std::string, double> per_domain_accuracy() const;
};

/// Argmax accuracy under inference mode; no augmentation is applied.
EvalResult evaluate_accuracy(const TrainedModel& model, const PatchDataset& ds, ImageProvider& images);

}  // namespace repshift
