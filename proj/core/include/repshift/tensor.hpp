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

#include <cstddef>
#include <vector>

namespace repshift::nn {

/// Per-sample feature-map shape (channels, height, width).
struct Shape {
  int c = 0;
  int h = 0;
  int w = 0;

  int size() const { return c * h * w; }
  bool operator==(const Shape&) const = default;
};

/// Dense NCHW batch of float32.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int batch, Shape shape)
      : batch_(batch), shape_(shape), data_(static_cast<size_t>(batch) * shape.size(), 0.0f) {}

  int batch() const { return batch_; }
  const Shape& shape() const { return shape_; }
  size_t sample_size() const { return static_cast<size_t>(shape_.size()); }
  size_t size() const { return data_.size(); }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  float* sample(int i) { return data_.data() + static_cast<size_t>(i) * sample_size(); }
  const float* sample(int i) const { return data_.data() + static_cast<size_t>(i) * sample_size(); }

  std::vector<float>& vec() { return data_; }
  const std::vector<float>& vec() const { return data_; }

  /// Same data, new per-sample shape (sizes must match).
  Tensor reshaped(Shape s) const {
    Tensor t = *this;
    t.shape_ = s;
    return t;
  }

 private:
  int batch_ = 0;
  Shape shape_;
  std::vector<float> data_;
};

/// Upper bound for the batch-level parallel loops. Heavy math runs inside
/// explicitly threaded regions; Eigen's own threading stays off. One thread
/// reproduces results bit-exactly; the deterministic CLI mode forces that.
void set_max_threads(int n);
int max_threads();

}  // namespace repshift::nn
