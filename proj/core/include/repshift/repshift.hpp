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

#include "repshift/activations.hpp"

namespace repshift {

/// Per-filter Wasserstein distances between the reference and target
/// activation distributions, and their unweighted mean R.
struct RepShiftResult {
  std::vector<double> per_filter;
  double mean_shift = 0.0;
  std::string ref_name;
  std::string target_name;
  std::string layer_id;
  std::string model_fingerprint;
  std::vector<std::string> warnings;
};

struct RepShiftOptions {
  /// Proceed (with a recorded warning) when layer ids or model fingerprints
  /// differ; deliberate cross-model comparisons need this.
  bool allow_cross_model = false;
  /// Z-score both matrices by the reference's per-filter statistics before
  /// measuring. Off by default; the metric consumes raw activations.
  bool standardize_by_ref = false;
};

/// The representation-shift score: per-filter exact 1-D Wasserstein
/// distances between the two sample columns, averaged uniformly over all
/// filters (dead filters included).
RepShiftResult representation_shift(const ActivationMatrix& ref, const ActivationMatrix& target,
                                    const RepShiftOptions& opts = {});

std::string repshift_to_json(const RepShiftResult& result, bool include_per_filter = true);

}  // namespace repshift
