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
#include <string>

#include "repshift/dataset.hpp"
#include "repshift/image.hpp"

namespace repshift {

class KeyValueConfig;

/// Two-domain benchmark generator. Patches are rendered through the H&E
/// optical-density forward model: a blob-structured hematoxylin field plus a
/// smooth eosin wash. Class identity lives in the blob statistics (texture),
/// domain identity is applied afterwards as a parametric color cast (hue
/// rotation + contrast scale), so class signal and domain signal are
/// independent by construction.
struct SynthConfig {
  int n_patches = 2000;
  int img_size = 96;
  int n_slides = 20;
  double hue_shift_deg = 0.0;
  double contrast_scale = 1.0;
  uint64_t seed = 0;
  std::string domain_id;   // derived from the cast parameters when empty
  bool pre_cast = false;   // oracle flag: emit structure images, skip the cast

  static SynthConfig from_config(const KeyValueConfig& cfg);
  std::string derived_domain_id() const;
  void validate() const;
};

/// Writes PNGs and a manifest under out_dir and returns the manifest-backed
/// dataset. Deterministic in (config, seed): per-patch generators are
/// derived from the base seed and the patch index. Also records the
/// class-conditional texture parameter ranges in generator_params.json
/// (these never depend on the domain cast).
PatchDataset synth_benchmark(const SynthConfig& config, const std::string& out_dir);

/// Renders one patch (class + per-patch seed -> image). Exposed for tests.
ImageU8 synth_patch(const SynthConfig& config, Label label, uint64_t patch_seed);

}  // namespace repshift
