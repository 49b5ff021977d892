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

#include <string>
#include <vector>

#include "repshift/loader.hpp"
#include "repshift/models.hpp"

namespace repshift {

/// Per-image, per-filter spatial-mean activations. Row i = image i of the
/// source dataset (record order), column j = filter j of the tagged layer.
struct ActivationMatrix {
  int n = 0;
  int l = 0;
  std::vector<float> values;  // row-major n*l
  std::string layer_id;
  std::string dataset_name;
  std::string model_fingerprint;

  float at(int i, int j) const { return values[static_cast<size_t>(i) * l + j]; }
  std::vector<double> column(int j) const;
};

/// Forwards every patch to the chosen layer (default: the model's
/// `last_conv` tag) under inference mode and records the spatial mean of
/// each filter map.
ActivationMatrix extract_mean_activations(const TrainedModel& model, const PatchDataset& ds,
                                          ImageProvider& images, const std::string& layer = "");

/// Binary dump: magic "RSHF", format version u8, u32 n, u32 L
/// (little-endian), n*L float32 little-endian row-major, CRC32 of the
/// payload. Metadata travels in a `<path>.json` sidecar.
void save_activations(const ActivationMatrix& m, const std::string& path);
ActivationMatrix load_activations(const std::string& path);

}  // namespace repshift
