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

#include "repshift/models.hpp"

#include "repshift/error.hpp"

namespace repshift {

using nn::AvgPool2d;
using nn::Conv2d;
using nn::Dense;
using nn::Dropout;
using nn::Flatten;
using nn::Inception;
using nn::MaxPool2d;
using nn::Relu;
using nn::Shape;

Arch arch_from_string(const std::string& s) {
  if (s == "simple_cnn") return Arch::simple_cnn;
  if (s == "mini_googlenet") return Arch::mini_googlenet;
  throw Error(ErrorCode::invalid_config, "unknown architecture '" + s + "'");
}

const char* arch_to_string(Arch a) {
  return a == Arch::simple_cnn ? "simple_cnn" : "mini_googlenet";
}

void ModelSpec::validate() const {
  if (input_size <= 0 || input_size % 4 != 0) {
    throw Error(ErrorCode::invalid_config, "input_size must be a positive multiple of 4");
  }
  if (n_classes < 2) throw Error(ErrorCode::invalid_config, "n_classes must be at least 2");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw Error(ErrorCode::invalid_config, "dropout_rate must lie in [0, 1)");
  }
}

int TrainedModel::resolve_layer(const std::string& tag_or_name) const {
  std::string name = tag_or_name;
  if (name.empty()) name = "last_conv";
  const auto it = layer_map.find(name);
  if (it != layer_map.end()) name = it->second;
  const int idx = net.index_of(name);
  if (idx < 0) throw Error(ErrorCode::unknown_layer, "no layer named '" + name + "'");
  return idx;
}

int TrainedModel::filters_at(int layer_idx) const {
  Shape s{3, spec.input_size, spec.input_size};
  for (int i = 0; i <= layer_idx; ++i) s = net.layer(i).out_shape(s);
  return s.c;
}

TrainedModel build_simple_cnn(const ModelSpec& spec, uint64_t init_seed) {
  spec.validate();
  if (spec.arch != Arch::simple_cnn) {
    throw Error(ErrorCode::invalid_config, "spec.arch is not simple_cnn");
  }

  TrainedModel m;
  m.spec = spec;
  auto& net = m.net;

  net.add("conv1", std::make_unique<Conv2d>("conv1", 3, 32, 3, 1, 1));
  net.add("conv1_relu", std::make_unique<Relu>());
  net.add("pool1", std::make_unique<MaxPool2d>(2, 2));
  net.add("conv2", std::make_unique<Conv2d>("conv2", 32, 64, 3, 1, 1));
  net.add("conv2_relu", std::make_unique<Relu>());
  net.add("pool2", std::make_unique<MaxPool2d>(2, 2));
  net.add("conv3", std::make_unique<Conv2d>("conv3", 64, 128, 3, 1, 1));
  net.add("conv3_relu", std::make_unique<Relu>());
  net.add("pool3", std::make_unique<MaxPool2d>(2, 2));
  net.add("flatten", std::make_unique<Flatten>());

  Shape s{3, spec.input_size, spec.input_size};
  for (size_t i = 0; i < net.layer_count(); ++i) s = net.layer(static_cast<int>(i)).out_shape(s);

  net.add("dropout1", std::make_unique<Dropout>(spec.dropout_rate));
  net.add("fc1", std::make_unique<Dense>("fc1", s.size(), 256));
  net.add("fc1_relu", std::make_unique<Relu>());
  net.add("dropout2", std::make_unique<Dropout>(spec.dropout_rate));
  net.add("fc2", std::make_unique<Dense>("fc2", 256, spec.n_classes));

  m.layer_map["last_conv"] = "conv3_relu";
  net.init_params(init_seed);
  return m;
}

TrainedModel build_mini_googlenet(const ModelSpec& spec, uint64_t init_seed) {
  spec.validate();
  if (spec.arch != Arch::mini_googlenet) {
    throw Error(ErrorCode::invalid_config, "spec.arch is not mini_googlenet");
  }

  TrainedModel m;
  m.spec = spec;
  auto& net = m.net;

  // Stem.
  net.add("stem_conv7", std::make_unique<Conv2d>("stem_conv7", 3, 64, 7, 2, 3));
  net.add("stem_conv7_relu", std::make_unique<Relu>());
  net.add("stem_pool1", std::make_unique<MaxPool2d>(3, 2, 1));
  net.add("stem_conv1", std::make_unique<Conv2d>("stem_conv1", 64, 64, 1, 1, 0));
  net.add("stem_conv1_relu", std::make_unique<Relu>());
  net.add("stem_conv3", std::make_unique<Conv2d>("stem_conv3", 64, 192, 3, 1, 1));
  net.add("stem_conv3_relu", std::make_unique<Relu>());
  net.add("stem_pool2", std::make_unique<MaxPool2d>(3, 2, 1));

  // Inception blocks up to the first auxiliary classifier.
  net.add("incep3a", std::make_unique<Inception>("incep3a", 192, 64, 96, 128, 16, 32, 32));
  net.add("incep3b", std::make_unique<Inception>("incep3b", 256, 128, 128, 192, 32, 96, 64));
  net.add("pool3", std::make_unique<MaxPool2d>(3, 2, 1));
  net.add("incep4a", std::make_unique<Inception>("incep4a", 480, 192, 96, 208, 16, 48, 64));

  // First auxiliary classifier, promoted to the sole head.
  net.add("aux_pool", std::make_unique<AvgPool2d>(5, 3));
  net.add("aux_conv", std::make_unique<Conv2d>("aux_conv", 512, 128, 1, 1, 0));
  net.add("aux_conv_relu", std::make_unique<Relu>());
  net.add("aux_flatten", std::make_unique<Flatten>());

  Shape s{3, spec.input_size, spec.input_size};
  for (size_t i = 0; i < net.layer_count(); ++i) s = net.layer(static_cast<int>(i)).out_shape(s);

  net.add("aux_fc1", std::make_unique<Dense>("aux_fc1", s.size(), 1024));
  net.add("aux_fc1_relu", std::make_unique<Relu>());
  net.add("aux_dropout", std::make_unique<Dropout>(spec.dropout_rate));
  net.add("aux_fc2", std::make_unique<Dense>("aux_fc2", 1024, spec.n_classes));

  m.layer_map["last_conv"] = "incep4a";
  m.layer_map["aux_head"] = "aux_pool";
  net.init_params(init_seed);
  return m;
}

TrainedModel build_model(const ModelSpec& spec, uint64_t init_seed) {
  switch (spec.arch) {
    case Arch::simple_cnn: return build_simple_cnn(spec, init_seed);
    case Arch::mini_googlenet: return build_mini_googlenet(spec, init_seed);
  }
  throw Error(ErrorCode::invalid_config, "unknown architecture");
}

nn::LayerCensus census(const TrainedModel& model) { return model.net.census(); }

int classification_head_count(const TrainedModel& model) {
  int heads = 0;
  auto& net = const_cast<nn::Sequential&>(model.net);
  for (size_t i = 0; i < net.layer_count(); ++i) {
    if (const auto* d = dynamic_cast<const nn::Dense*>(&net.layer(static_cast<int>(i)))) {
      if (d->out_features() == model.spec.n_classes) ++heads;
    }
  }
  return heads;
}

}  // namespace repshift
