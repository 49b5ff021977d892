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

#include <variant>
#include <vector>

#include "repshift/image.hpp"
#include "repshift/rng.hpp"

namespace repshift {

/// Random HSV jitter, one draw per channel per image. hue_delta is a
/// fraction of the full hue circle; the scale deltas are relative factor
/// ranges around 1. The defaults are deliberately extreme; color-robust
/// training needs unnatural variation.
struct HsvJitterConfig {
  double hue_delta = 0.5;
  double sat_scale_delta = 0.5;
  double val_scale_delta = 0.5;

  void validate() const;
};

/// Random flip / rotation / crop.
struct GeoAugConfig {
  bool allow_flips = true;
  std::vector<int> rotations = {0, 90, 180, 270};  // degrees, subset of these four
  int crop_size = 96;

  void validate() const;
};

ImageU8 hsv_color_augment(const ImageU8& image, const HsvJitterConfig& cfg, Rng& rng);
ImageU8 geometric_augment(const ImageU8& image, const GeoAugConfig& cfg, Rng& rng);

ImageU8 rotate90(const ImageU8& image, int quarter_turns);
ImageU8 flip_horizontal(const ImageU8& image);
ImageU8 crop(const ImageU8& image, int x0, int y0, int width, int height);
ImageU8 center_crop(const ImageU8& image, int size);

/// Ordered training-time augmentation pipeline.
using AugmentStep = std::variant<GeoAugConfig, HsvJitterConfig>;
ImageU8 apply_augmentations(const ImageU8& image, const std::vector<AugmentStep>& pipeline, Rng& rng);

}  // namespace repshift
