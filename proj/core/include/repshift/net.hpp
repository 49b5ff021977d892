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

#include <memory>
#include <string>
#include <vector>

#include "repshift/layers.hpp"

namespace repshift::nn {

/// Ordered layer stack. Branching lives inside composite layers (Inception),
/// so the top-level graph stays a simple chain; that keeps "forward to layer
/// k, backward from layer k" queries trivial, which both the activation
/// extraction and the input-gradient ascent rely on.
class Sequential {
 public:
  Sequential() = default;
  Sequential(const Sequential& other);
  Sequential& operator=(const Sequential& other);
  Sequential(Sequential&&) = default;
  Sequential& operator=(Sequential&&) = default;

  int add(const std::string& name, std::unique_ptr<Layer> layer);

  size_t layer_count() const { return layers_.size(); }
  Layer& layer(int idx) { return *layers_[idx]; }
  const Layer& layer(int idx) const { return *layers_[idx]; }
  const std::string& layer_name(int idx) const { return names_[idx]; }
  /// -1 when absent.
  int index_of(const std::string& name) const;

  Tensor forward(const Tensor& x, Mode mode);
  /// Output of layers_[last_idx].
  Tensor forward_to(const Tensor& x, int last_idx, Mode mode);
  /// Gradient w.r.t. the network input; dy matches the output of
  /// layers_[from_idx]. Requires a prior caching forward.
  Tensor backward_from(const Tensor& dy, int from_idx);
  Tensor backward(const Tensor& dy) { return backward_from(dy, static_cast<int>(layers_.size()) - 1); }

  std::vector<ParamTensor*> params();
  void zero_grads();
  void init_params(uint64_t seed);
  void reseed_dropout(uint64_t seed);

  LayerCensus census() const;

  /// FNV-1a over all parameter bytes in declaration order.
  std::string weights_fingerprint() const;

  std::vector<float> snapshot_weights() const;
  void restore_weights(const std::vector<float>& snapshot);

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<std::string> names_;
};

}  // namespace repshift::nn
