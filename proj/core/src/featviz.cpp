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

#include "repshift/featviz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "repshift/error.hpp"
#include "repshift/rng.hpp"

namespace repshift {

namespace {

struct Objective {
  double activation = 0.0;
  nn::Tensor input_grad;
};

// One forward to the target layer plus one backward to the input. The
// gradient seed is 1/(h*w) on the chosen channel: the objective is the
// spatial mean of the filter map, matching the statistic the shift metric
// consumes.
Objective eval_objective(TrainedModel& model, int layer_idx, int filter_idx, const nn::Tensor& x) {
  Objective obj;
  const nn::Tensor feat = model.net.forward_to(x, layer_idx, nn::Mode::kEval);
  const nn::Shape s = feat.shape();
  const size_t plane = static_cast<size_t>(s.h) * s.w;
  const float* f = feat.sample(0) + static_cast<size_t>(filter_idx) * plane;
  double sum = 0.0;
  for (size_t i = 0; i < plane; ++i) sum += f[i];
  obj.activation = sum / static_cast<double>(plane);

  nn::Tensor dy(1, s);
  float* d = dy.sample(0) + static_cast<size_t>(filter_idx) * plane;
  const float g = 1.0f / static_cast<float>(plane);
  for (size_t i = 0; i < plane; ++i) d[i] = g;
  obj.input_grad = model.net.backward_from(dy, layer_idx);
  return obj;
}

void circular_shift(const std::vector<float>& src, std::vector<float>& dst, int size, int dx, int dy) {
  const size_t plane = static_cast<size_t>(size) * size;
  for (int c = 0; c < 3; ++c) {
    const float* sp = src.data() + c * plane;
    float* dp = dst.data() + c * plane;
    for (int y = 0; y < size; ++y) {
      const int sy = ((y - dy) % size + size) % size;
      for (int x = 0; x < size; ++x) {
        const int sx = ((x - dx) % size + size) % size;
        dp[static_cast<size_t>(y) * size + x] = sp[static_cast<size_t>(sy) * size + sx];
      }
    }
  }
}

}  // namespace

void FeatVizConfig::validate() const {
  if (steps < 0) throw Error(ErrorCode::invalid_config, "steps must be >= 0");
  if (step_size <= 0.0) throw Error(ErrorCode::invalid_config, "step_size must be positive");
  if (init_amplitude < 0.0) throw Error(ErrorCode::invalid_config, "init_amplitude must be >= 0");
  if (jitter < 0) throw Error(ErrorCode::invalid_config, "jitter must be >= 0");
}

FeatVizResult maximize_filter(const TrainedModel& model, const std::string& layer, int filter_idx,
                              const FeatVizConfig& cfg) {
  cfg.validate();
  const int layer_idx = model.resolve_layer(layer);
  const int filters = model.filters_at(layer_idx);
  if (filter_idx < 0 || filter_idx >= filters) {
    throw Error(ErrorCode::invalid_filter, "filter index " + std::to_string(filter_idx) +
                                               " out of range (layer has " + std::to_string(filters) +
                                               " filters)");
  }

  TrainedModel scratch = model;  // private caches for forward/backward
  const int size = model.spec.input_size;
  Rng rng(cfg.seed);

  nn::Tensor x(1, {3, size, size});
  for (auto& v : x.vec()) {
    v = static_cast<float>(cfg.init_gray + rng.uniform(-cfg.init_amplitude, cfg.init_amplitude));
  }

  FeatVizResult result;
  result.size = size;
  result.trace.reserve(cfg.steps + 1);

  Objective obj = eval_objective(scratch, layer_idx, filter_idx, x);
  result.trace.push_back(obj.activation);

  int consecutive_dead = 0;
  std::vector<float> shifted(x.size());
  for (int step = 1; step <= cfg.steps; ++step) {
    nn::Tensor* grad = &obj.input_grad;
    int dx = 0, dy = 0;
    nn::Tensor jitter_grad;
    if (cfg.jitter > 0) {
      // Gradient of the objective under a small random translation; the
      // evaluation below already happened on the unshifted image, so shift,
      // re-evaluate, and unshift the gradient.
      dx = static_cast<int>(rng.next_below(2 * cfg.jitter + 1)) - cfg.jitter;
      dy = static_cast<int>(rng.next_below(2 * cfg.jitter + 1)) - cfg.jitter;
      circular_shift(x.vec(), shifted, size, dx, dy);
      nn::Tensor xs = x;
      xs.vec() = shifted;
      Objective jobj = eval_objective(scratch, layer_idx, filter_idx, xs);
      jitter_grad = nn::Tensor(1, {3, size, size});
      circular_shift(jobj.input_grad.vec(), jitter_grad.vec(), size, -dx, -dy);
      grad = &jitter_grad;
    }

    double norm2 = 0.0;
    for (float v : grad->vec()) norm2 += static_cast<double>(v) * v;
    const double norm = std::sqrt(norm2);
    if (norm < 1e-20) {
      if (++consecutive_dead > 10) {
        throw Error(ErrorCode::dead_filter,
                    "filter " + std::to_string(filter_idx) + " produced zero gradient for " +
                        std::to_string(consecutive_dead) + " consecutive steps");
      }
    } else {
      consecutive_dead = 0;
      const float scale = static_cast<float>(cfg.step_size / norm);
      for (size_t i = 0; i < x.size(); ++i) x.vec()[i] += scale * grad->vec()[i];
    }

    obj = eval_objective(scratch, layer_idx, filter_idx, x);
    result.trace.push_back(obj.activation);
  }

  result.raw = x.vec();

  // Display mapping: linear min-max to 8 bits. Optimization is unclamped,
  // so rendered colors are indicative only.
  float lo = x.vec()[0], hi = x.vec()[0];
  for (float v : x.vec()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const float range = hi > lo ? hi - lo : 1.0f;
  result.display = ImageU8(size, size);
  const size_t plane = static_cast<size_t>(size) * size;
  for (size_t i = 0; i < plane; ++i) {
    for (int c = 0; c < 3; ++c) {
      const float v = (x.vec()[c * plane + i] - lo) / range;
      result.display.data()[3 * i + c] =
          static_cast<uint8_t>(std::clamp(std::nearbyint(v * 255.0f), 0.0f, 255.0f));
    }
  }
  return result;
}

double filter_mean_activation(const TrainedModel& model, const std::string& layer, int filter_idx,
                              const std::vector<float>& raw, int size) {
  TrainedModel scratch = model;
  const int layer_idx = model.resolve_layer(layer);
  nn::Tensor x(1, {3, size, size});
  x.vec() = raw;
  const nn::Tensor feat = scratch.net.forward_to(x, layer_idx, nn::Mode::kInfer);
  const nn::Shape s = feat.shape();
  const size_t plane = static_cast<size_t>(s.h) * s.w;
  const float* f = feat.sample(0) + static_cast<size_t>(filter_idx) * plane;
  double sum = 0.0;
  for (size_t i = 0; i < plane; ++i) sum += f[i];
  return sum / static_cast<double>(plane);
}

void save_trace_csv(const std::string& path, const std::vector<double>& trace) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write trace: " + path);
  out << "step,activation\n";
  for (size_t i = 0; i < trace.size(); ++i) out << i << ',' << trace[i] << '\n';
}

ImageU8 compose_grid(const std::vector<ImageU8>& tiles, int columns, int padding) {
  if (tiles.empty()) throw Error(ErrorCode::invalid_config, "no tiles to compose");
  if (columns < 1) throw Error(ErrorCode::invalid_config, "columns must be >= 1");
  const int tw = tiles[0].width();
  const int th = tiles[0].height();
  for (const auto& t : tiles) {
    if (t.width() != tw || t.height() != th) {
      throw Error(ErrorCode::invalid_config, "contact sheet tiles must share dimensions");
    }
  }
  const int rows = (static_cast<int>(tiles.size()) + columns - 1) / columns;
  ImageU8 sheet(columns * tw + (columns + 1) * padding, rows * th + (rows + 1) * padding);
  std::fill(sheet.data(), sheet.data() + sheet.size(), 32);
  for (size_t i = 0; i < tiles.size(); ++i) {
    const int r = static_cast<int>(i) / columns;
    const int c = static_cast<int>(i) % columns;
    const int ox = padding + c * (tw + padding);
    const int oy = padding + r * (th + padding);
    for (int y = 0; y < th; ++y)
      for (int x = 0; x < tw; ++x)
        for (int ch = 0; ch < 3; ++ch) sheet.at(ox + x, oy + y, ch) = tiles[i].at(x, y, ch);
  }
  return sheet;
}

}  // namespace repshift
