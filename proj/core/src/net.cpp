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

#include "repshift/net.hpp"

#include <cstdio>
#include <cstring>

#include "repshift/error.hpp"

namespace repshift::nn {

Sequential::Sequential(const Sequential& other) : names_(other.names_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Sequential& Sequential::operator=(const Sequential& other) {
  if (this == &other) return *this;
  names_ = other.names_;
  layers_.clear();
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
  return *this;
}

int Sequential::add(const std::string& name, std::unique_ptr<Layer> layer) {
  names_.push_back(name);
  layers_.push_back(std::move(layer));
  return static_cast<int>(layers_.size()) - 1;
}

int Sequential::index_of(const std::string& name) const {
  for (size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Tensor Sequential::forward(const Tensor& x, Mode mode) {
  return forward_to(x, static_cast<int>(layers_.size()) - 1, mode);
}

Tensor Sequential::forward_to(const Tensor& x, int last_idx, Mode mode) {
  if (last_idx < 0 || last_idx >= static_cast<int>(layers_.size())) {
    throw Error(ErrorCode::unknown_layer, "layer index out of range");
  }
  Tensor t = x;
  for (int i = 0; i <= last_idx; ++i) t = layers_[i]->forward(t, mode);
  return t;
}

Tensor Sequential::backward_from(const Tensor& dy, int from_idx) {
  if (from_idx < 0 || from_idx >= static_cast<int>(layers_.size())) {
    throw Error(ErrorCode::unknown_layer, "layer index out of range");
  }
  Tensor g = dy;
  for (int i = from_idx; i >= 0; --i) g = layers_[i]->backward(g);
  return g;
}

std::vector<ParamTensor*> Sequential::params() {
  std::vector<ParamTensor*> out;
  for (auto& l : layers_) l->collect_params(out);
  return out;
}

void Sequential::zero_grads() {
  for (ParamTensor* p : params()) std::fill(p->g.begin(), p->g.end(), 0.0f);
}

void Sequential::init_params(uint64_t seed) {
  Rng rng(seed);
  for (auto& l : layers_) l->init_params(rng);
}

void Sequential::reseed_dropout(uint64_t seed) {
  uint64_t i = 0;
  for (auto& l : layers_) {
    if (auto* d = dynamic_cast<Dropout*>(l.get())) d->reseed(derive_seed(seed, i));
    ++i;
  }
}

LayerCensus Sequential::census() const {
  LayerCensus c;
  for (const auto& l : layers_) l->add_census(c);
  return c;
}

std::string Sequential::weights_fingerprint() const {
  uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](const void* data, size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < bytes; ++i) {
      hash ^= p[i];
      hash *= 0x100000001b3ULL;
    }
  };
  for (ParamTensor* p : const_cast<Sequential*>(this)->params()) {
    mix(p->w.data(), p->w.size() * sizeof(float));
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::vector<float> Sequential::snapshot_weights() const {
  std::vector<float> out;
  for (ParamTensor* p : const_cast<Sequential*>(this)->params()) {
    out.insert(out.end(), p->w.begin(), p->w.end());
  }
  return out;
}

void Sequential::restore_weights(const std::vector<float>& snapshot) {
  size_t offset = 0;
  for (ParamTensor* p : params()) {
    if (offset + p->w.size() > snapshot.size()) {
      throw Error(ErrorCode::internal, "weight snapshot too small");
    }
    std::copy(snapshot.begin() + offset, snapshot.begin() + offset + p->w.size(), p->w.begin());
    offset += p->w.size();
  }
  if (offset != snapshot.size()) throw Error(ErrorCode::internal, "weight snapshot size mismatch");
}

}  // namespace repshift::nn
