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
#include <map>
#include <string>

#include "repshift/net.hpp"

namespace repshift {

enum class Arch { simple_cnn, mini_googlenet };

Arch arch_from_string(const std::string& s);
const char* arch_to_string(Arch a);

struct ModelSpec {
  Arch arch = Arch::simple_cnn;
  int input_size = 96;
  int n_classes = 2;
  double dropout_rate = 0.5;

  void validate() const;  // input_size divisible by 4, n_classes >= 2
};

struct TrainingMeta {
  uint64_t seed = 0;
  int epochs_run = 0;
  double best_val_accuracy = 0.0;
};

/// A built (and possibly trained) classifier plus its layer tags. The
/// `last_conv` tag names the post-nonlinearity output whose per-filter mean
/// activations feed the representation-shift metric.
struct TrainedModel {
  ModelSpec spec;
  nn::Sequential net;
  std::map<std::string, std::string> layer_map;  // tag -> layer name
  TrainingMeta meta;

  std::string fingerprint() const { return net.weights_fingerprint(); }
  /// Resolves a tag or literal layer name to an index; empty = last_conv.
  int resolve_layer(const std::string& tag_or_name = "") const;
  int filters_at(int layer_idx) const;
};

/// Three conv blocks (3x3 conv, ReLU, 2x2 maxpool; widths 32/64/128) and two
/// fully connected layers with dropout before each; no batch normalization.
/// last_conv = the third convolution's ReLU output.
TrainedModel build_simple_cnn(const ModelSpec& spec, uint64_t init_seed);

/// GoogLeNet stem and inception blocks up to and including 4a, then the
/// first auxiliary classifier as the sole head. last_conv = the 4a concat
/// output (each branch post-ReLU).
TrainedModel build_mini_googlenet(const ModelSpec& spec, uint64_t init_seed);

TrainedModel build_model(const ModelSpec& spec, uint64_t init_seed);

nn::LayerCensus census(const TrainedModel& model);

/// Number of Dense layers emitting spec.n_classes outputs.
int classification_head_count(const TrainedModel& model);

}  // namespace repshift
