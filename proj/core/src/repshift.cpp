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

#include "repshift/repshift.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "repshift/error.hpp"
#include "repshift/tensor.hpp"
#include "repshift/wasserstein.hpp"

namespace repshift {

namespace {

// Column statistics of the reference matrix for optional standardization.
void standardize(std::vector<double>& ref_col, std::vector<double>& tgt_col) {
  double mean = 0.0;
  for (double v : ref_col) mean += v;
  mean /= static_cast<double>(ref_col.size());
  double var = 0.0;
  for (double v : ref_col) var += (v - mean) * (v - mean);
  var /= static_cast<double>(ref_col.size());
  const double scale = var > 1e-24 ? 1.0 / std::sqrt(var) : 1.0;
  for (double& v : ref_col) v = (v - mean) * scale;
  for (double& v : tgt_col) v = (v - mean) * scale;
}

}  // namespace

RepShiftResult representation_shift(const ActivationMatrix& ref, const ActivationMatrix& target,
                                    const RepShiftOptions& opts) {
  if (ref.n < 1 || target.n < 1) {
    throw Error(ErrorCode::empty_dataset, "activation matrices must have at least one row");
  }
  if (ref.l != target.l) {
    throw Error(ErrorCode::filter_count_mismatch,
                "reference has " + std::to_string(ref.l) + " filters, target has " +
                    std::to_string(target.l));
  }

  RepShiftResult result;
  if (ref.layer_id != target.layer_id) {
    const std::string msg = "layer mismatch: '" + ref.layer_id + "' vs '" + target.layer_id + "'";
    if (!opts.allow_cross_model) throw Error(ErrorCode::layer_mismatch, msg);
    result.warnings.push_back(msg);
  }
  if (ref.model_fingerprint != target.model_fingerprint) {
    const std::string msg =
        "model fingerprint mismatch: " + ref.model_fingerprint + " vs " + target.model_fingerprint;
    if (!opts.allow_cross_model) throw Error(ErrorCode::model_mismatch, msg);
    result.warnings.push_back(msg);
  }

  result.ref_name = ref.dataset_name;
  result.target_name = target.dataset_name;
  result.layer_id = ref.layer_id;
  result.model_fingerprint = ref.model_fingerprint;
  result.per_filter.assign(ref.l, 0.0);

  const int threads = std::min(nn::max_threads(), ref.l);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (int j = 0; j < ref.l; ++j) {
    std::vector<double> a = ref.column(j);
    std::vector<double> b = target.column(j);
    if (opts.standardize_by_ref) standardize(a, b);
    result.per_filter[j] = wasserstein_1d(a, b);
  }

  double sum = 0.0;
  for (double d : result.per_filter) sum += d;
  result.mean_shift = sum / static_cast<double>(ref.l);
  return result;
}

std::string repshift_to_json(const RepShiftResult& result, bool include_per_filter) {
  nlohmann::json j;
  j["mean_shift"] = result.mean_shift;
  j["n_filters"] = result.per_filter.size();
  if (include_per_filter) j["per_filter"] = result.per_filter;
  j["ref_name"] = result.ref_name;
  j["target_name"] = result.target_name;
  j["layer_id"] = result.layer_id;
  j["model_fingerprint"] = result.model_fingerprint;
  if (!result.warnings.empty()) j["warnings"] = result.warnings;
  return j.dump(2);
}

}  // namespace repshift
