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

#include "repshift/image.hpp"
#include "repshift/models.hpp"

namespace repshift {

struct FeatVizConfig {
  int steps = 512;
  double step_size = 0.05;        // after L2 gradient normalization
  double init_gray = 0.0;         // mean in the [-1, 1] input space
  double init_amplitude = 0.1;    // uniform noise half-width around the mean
  uint64_t seed = 0;
  int jitter = 0;                 // max per-step circular translation, pixels

  void validate() const;
};

struct FeatVizResult {
  ImageU8 display;             // min-max rescaled for viewing only
  std::vector<float> raw;      // planar CHW floats in the optimization space
  int size = 0;
  std::vector<double> trace;   // steps + 1 activations, initial value first
};

/// Gradient ascent on the input image toward maximal spatial-mean activation
/// of one filter. No pixel clamping during optimization. Throws
/// Error(dead_filter) when the input gradient is identically zero for more
/// than 10 consecutive steps.
FeatVizResult maximize_filter(const TrainedModel& model, const std::string& layer, int filter_idx,
                              const FeatVizConfig& cfg);

/// Recomputes the objective from a raw result image; tests use it to confirm
/// the trace reports the optimized quantity.
double filter_mean_activation(const TrainedModel& model, const std::string& layer, int filter_idx,
                              const std::vector<float>& raw, int size);

void save_trace_csv(const std::string& path, const std::vector<double>& trace);

/// Contact sheet of equally sized tiles.
ImageU8 compose_grid(const std::vector<ImageU8>& tiles, int columns, int padding = 2);

}  // namespace repshift
