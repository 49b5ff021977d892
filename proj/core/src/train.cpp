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

#include "repshift/train.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "repshift/error.hpp"

namespace repshift {

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCode::invalid_config, "epochs must be >= 1");
  if (batch_size < 1) throw Error(ErrorCode::invalid_config, "batch_size must be >= 1");
  if (learning_rate <= 0.0) throw Error(ErrorCode::invalid_config, "learning_rate must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw Error(ErrorCode::invalid_config, "momentum must lie in [0, 1)");
  if (early_stop_patience < 0) throw Error(ErrorCode::invalid_config, "early_stop_patience must be >= 0");
}

void save_history_csv(const std::string& path, const TrainHistory& history) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write history: " + path);
  out << "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
  for (const auto& e : history.epochs) {
    out << e.epoch << ',' << e.train_loss << ',' << e.train_accuracy << ',' << e.val_loss << ','
        << e.val_accuracy << '\n';
  }
}

namespace {

struct BatchEval {
  double loss = 0.0;
  size_t correct = 0;
};

// Forward a dataset in inference mode and tally loss / accuracy.
BatchEval eval_pass(TrainedModel& model, const PatchDataset& ds, ImageProvider& images,
                    int batch_size, EvalResult* per_domain_out) {
  BatchEval stats;
  const int size = model.spec.input_size;
  const size_t n = ds.size();
  for (size_t start = 0; start < n; start += batch_size) {
    const int b = static_cast<int>(std::min<size_t>(batch_size, n - start));
    nn::Tensor x(b, {3, size, size});
    std::vector<int> labels(b);
    for (int j = 0; j < b; ++j) {
      const ImageU8 img = images.load(ds, start + j);
      image_to_sample(img, size, x.sample(j));
      labels[j] = static_cast<int>(ds.records[start + j].label);
    }
    nn::Tensor logits = model.net.forward(x, nn::Mode::kInfer);
    const auto loss = nn::softmax_cross_entropy(logits, labels);
    stats.loss += loss.loss * b;
    stats.correct += loss.correct;
    if (per_domain_out) {
      const int classes = logits.shape().size();
      for (int j = 0; j < b; ++j) {
        const float* z = logits.sample(j);
        int arg = 0;
        for (int c = 1; c < classes; ++c) {
          if (z[c] > z[arg]) arg = c;
        }
        auto& cell = per_domain_out->per_domain[ds.records[start + j].domain_id];
        cell.second += 1;
        if (arg == labels[j]) cell.first += 1;
      }
    }
  }
  return stats;
}

}  // namespace

TrainHistory train(TrainedModel& model, const PatchDataset& train_ds, const PatchDataset& val_ds,
                   const TrainConfig& cfg, ImageProvider& images) {
  cfg.validate();
  if (train_ds.empty()) throw Error(ErrorCode::empty_dataset, "training set is empty");

  const auto train_slides = train_ds.slide_ids();
  for (const auto& r : val_ds.records) {
    if (train_slides.count(r.slide_id)) {
      throw Error(ErrorCode::slide_overlap, "slide '" + r.slide_id + "' appears in train and val");
    }
  }

  model.net.reseed_dropout(derive_seed(cfg.seed, 0xd0));
  model.meta.seed = cfg.seed;

  // Momentum buffers aligned with the parameter list.
  auto params = model.net.params();
  std::vector<std::vector<float>> velocity;
  velocity.reserve(params.size());
  for (auto* p : params) velocity.emplace_back(p->w.size(), 0.0f);

  const int size = model.spec.input_size;
  const size_t n = train_ds.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(derive_seed(cfg.seed, 0x5f));

  TrainHistory history;
  std::vector<float> best_weights = model.net.snapshot_weights();
  double best_val_acc = -1.0;
  int best_epoch = 0;
  int epochs_since_best = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    size_t epoch_correct = 0;

    for (size_t start = 0; start < n; start += cfg.batch_size) {
      const int b = static_cast<int>(std::min<size_t>(cfg.batch_size, n - start));
      nn::Tensor x(b, {3, size, size});
      std::vector<int> labels(b);
      for (int j = 0; j < b; ++j) {
        const size_t rec = order[start + j];
        ImageU8 img = images.load(train_ds, rec);
        if (!cfg.augmentations.empty()) {
          Rng aug_rng(derive_seed(cfg.seed, static_cast<uint64_t>(epoch) * n + rec));
          img = apply_augmentations(img, cfg.augmentations, aug_rng);
        }
        image_to_sample(img, size, x.sample(j));
        labels[j] = static_cast<int>(train_ds.records[rec].label);
      }

      model.net.zero_grads();
      nn::Tensor logits = model.net.forward(x, nn::Mode::kTrain);
      auto loss = nn::softmax_cross_entropy(logits, labels);
      model.net.backward(loss.dlogits);

      for (size_t p = 0; p < params.size(); ++p) {
        float* w = params[p]->w.data();
        const float* g = params[p]->g.data();
        float* v = velocity[p].data();
        const float lr = static_cast<float>(cfg.learning_rate);
        const float mu = static_cast<float>(cfg.momentum);
        for (size_t k = 0; k < params[p]->w.size(); ++k) {
          v[k] = mu * v[k] - lr * g[k];
          w[k] += v[k];
        }
      }

      epoch_loss += loss.loss * b;
      epoch_correct += loss.correct;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(n);
    stats.train_accuracy = static_cast<double>(epoch_correct) / static_cast<double>(n);

    if (!val_ds.empty()) {
      const BatchEval v = eval_pass(model, val_ds, images, cfg.batch_size, nullptr);
      stats.val_loss = v.loss / static_cast<double>(val_ds.size());
      stats.val_accuracy = static_cast<double>(v.correct) / static_cast<double>(val_ds.size());
      if (stats.val_accuracy > best_val_acc) {
        best_val_acc = stats.val_accuracy;
        best_weights = model.net.snapshot_weights();
        best_epoch = epoch;
        epochs_since_best = 0;
      } else {
        ++epochs_since_best;
      }
    }
    history.epochs.push_back(stats);

    if (!val_ds.empty() && epochs_since_best > cfg.early_stop_patience) break;
  }

  if (!val_ds.empty()) {
    model.net.restore_weights(best_weights);
    history.best_epoch = best_epoch;
    model.meta.best_val_accuracy = best_val_acc;
  } else {
    history.best_epoch = 0;
    model.meta.best_val_accuracy = 0.0;
  }
  model.meta.epochs_run = static_cast<int>(history.epochs.size());
  return history;
}

std::map<std::string, double> EvalResult::per_domain_accuracy() const {
  std::map<std::string, double> out;
  for (const auto& [domain, cell] : per_domain) {
    out[domain] = cell.second ? static_cast<double>(cell.first) / static_cast<double>(cell.second) : 0.0;
  }
  return out;
}

EvalResult evaluate_accuracy(const TrainedModel& model, const PatchDataset& ds, ImageProvider& images) {
  if (ds.empty()) throw Error(ErrorCode::empty_dataset, "cannot evaluate an empty dataset");
  TrainedModel scratch = model;  // private caches; the input model stays shareable
  EvalResult result;
  const BatchEval stats = eval_pass(scratch, ds, images, 64, &result);
  result.n = ds.size();
  result.accuracy = static_cast<double>(stats.correct) / static_cast<double>(ds.size());
  return result;
}

}  // namespace repshift
