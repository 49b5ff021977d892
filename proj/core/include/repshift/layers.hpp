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

#include "repshift/rng.hpp"
#include "repshift/tensor.hpp"

namespace repshift::nn {

enum class Mode {
  kTrain,  // dropout active, caches kept for backward
  kEval,   // dropout off, caches kept (input-gradient queries)
  kInfer,  // dropout off, no caches
};

struct ParamTensor {
  std::string name;
  std::vector<float> w;
  std::vector<float> g;
};

struct LayerCensus {
  int conv = 0;
  int dense = 0;
  int batchnorm = 0;  // no such layer exists in this framework; stays 0
  int dropout = 0;
  int inception = 0;
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual const char* kind() const = 0;
  virtual Shape out_shape(const Shape& in) const = 0;
  virtual Tensor forward(const Tensor& x, Mode mode) = 0;
  /// Valid after a forward in kTrain or kEval mode; parameter gradients
  /// accumulate into ParamTensor::g.
  virtual Tensor backward(const Tensor& dy) = 0;
  virtual void collect_params(std::vector<ParamTensor*>& out) {}
  virtual void init_params(Rng& rng) {}
  virtual void add_census(LayerCensus& c) const {}
  virtual std::unique_ptr<Layer> clone() const = 0;
};

class Conv2d final : public Layer {
 public:
  Conv2d(std::string name, int in_channels, int out_channels, int kernel, int stride, int pad);

  const char* kind() const override { return "conv2d"; }
  Shape out_shape(const Shape& in) const override;
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& dy) override;
  void collect_params(std::vector<ParamTensor*>& out) override;
  void init_params(Rng& rng) override;
  void add_census(LayerCensus& c) const override { ++c.conv; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv2d>(*this); }

  int out_channels() const { return out_channels_; }

 private:
  int in_c_, out_c_ = 0, kernel_, stride_, pad_;
  int out_channels_;
  ParamTensor weight_, bias_;
  Tensor cached_input_;
};

class Relu final : public Layer {
 public:
  const char* kind() const override { return "relu"; }
  Shape out_shape(const Shape& in) const override { return in; }
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& dy) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Relu>(*this); }

 private:
  Tensor cached_output_;
};

class MaxPool2d final : public Layer {
 public:
  MaxPool2d(int kernel, int stride, int pad = 0) : kernel_(kernel), stride_(stride), pad_(pad) {}

  const char* kind() const override { return "maxpool"; }
  Shape out_shape(const Shape& in) const override;
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& dy) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<MaxPool2d>(*this); }

 private:
  int kernel_, stride_, pad_;
  Shape in_shape_;
  int cached_batch_ = 0;
  std::vector<int> argmax_;
};

class AvgPool2d final : public Layer {
 public:
  AvgPool2d(int kernel, int stride) : kernel_(kernel), stride_(stride) {}

  const char* kind() const override { return "avgpool"; }
  Shape out_shape(const Shape& in) const override;
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& dy) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<AvgPool2d>(*this); }

 private:
  int kernel_, stride_;
  Shape in_shape_;
  int cached_batch_ = 0;
};

class Dense final : public Layer {
 public:
  Dense(std::string name, int in_features, int out_features);

  const char* kind() const override { return "dense"; }
  Shape out_shape(const Shape& in) const override { return {out_features_, 1, 1}; }
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& dy) override;
  void collect_params(std::vector<ParamTensor*>& out) override;
  void init_params(Rng& rng) override;
  void add_census(LayerCensus& c) const override { ++c.dense; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }

  int out_features() const { return out_features_; }

 private:
  int in_features_, out_features_;
  ParamTensor weight_, bias_;
  Tensor cached_input_;
};

class Dropout final : public Layer {
 public:
  explicit Dropout(double rate) : rate_(rate) {}

  const char* kind() const override { return "dropout"; }
  Shape out_shape(const Shape& in) const override { return in; }
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& dy) override;
  void add_census(LayerCensus& c) const override { ++c.dropout; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dropout>(*this); }

  void reseed(uint64_t seed) { rng_ = Rng(seed); }

 private:
  double rate_;
  Rng rng_{0};
  std::vector<float> mask_;
  bool identity_ = true;
};

class Flatten final : public Layer {
 public:
  const char* kind() const override { return "flatten"; }
  Shape out_shape(const Shape& in) const override { return {in.size(), 1, 1}; }
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& dy) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Flatten>(*this); }

 private:
  Shape in_shape_;
};

/// GoogLeNet inception block: four parallel branches (1x1 | 1x1-3x3 |
/// 1x1-5x5 | maxpool-1x1), each convolution followed by ReLU, outputs
/// concatenated along channels.
class Inception final : public Layer {
 public:
  Inception(std::string name, int in_channels, int b1_out, int b2_reduce, int b2_out, int b3_reduce,
            int b3_out, int b4_out);
  Inception(const Inception& other);
  Inception& operator=(const Inception&) = delete;

  const char* kind() const override { return "inception"; }
  Shape out_shape(const Shape& in) const override;
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& dy) override;
  void collect_params(std::vector<ParamTensor*>& out) override;
  void init_params(Rng& rng) override;
  void add_census(LayerCensus& c) const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Inception>(*this); }

  int out_channels() const { return out_channels_; }

 private:
  std::vector<std::vector<std::unique_ptr<Layer>>> branches_;
  std::vector<int> branch_channels_;
  int out_channels_ = 0;
};

/// Softmax cross-entropy over (batch, classes) logits; dlogits is already
/// scaled by 1/batch.
struct LossResult {
  double loss = 0.0;
  size_t correct = 0;
  Tensor dlogits;
};
LossResult softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels);

}  // namespace repshift::nn
