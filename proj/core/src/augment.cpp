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

#include "repshift/augment.hpp"

#include <algorithm>

#include "repshift/color.hpp"
#include "repshift/error.hpp"

namespace repshift {

void HsvJitterConfig::validate() const {
  if (hue_delta < 0.0 || hue_delta > 0.5 || sat_scale_delta < 0.0 || val_scale_delta < 0.0) {
    throw Error(ErrorCode::invalid_config, "HSV jitter deltas must be >= 0 with hue_delta <= 0.5");
  }
}

void GeoAugConfig::validate() const {
  if (rotations.empty()) {
    throw Error(ErrorCode::invalid_config, "geometric augmentation needs at least one rotation");
  }
  for (int r : rotations) {
    if (r != 0 && r != 90 && r != 180 && r != 270) {
      throw Error(ErrorCode::invalid_config, "rotations must be multiples of 90 degrees");
    }
  }
  if (crop_size <= 0) throw Error(ErrorCode::invalid_config, "crop_size must be positive");
}

ImageU8 hsv_color_augment(const ImageU8& image, const HsvJitterConfig& cfg, Rng& rng) {
  cfg.validate();
  const double dh = rng.uniform(-cfg.hue_delta, cfg.hue_delta);
  const double fs = rng.uniform(1.0 - cfg.sat_scale_delta, 1.0 + cfg.sat_scale_delta);
  const double fv = rng.uniform(1.0 - cfg.val_scale_delta, 1.0 + cfg.val_scale_delta);
  return apply_hsv_adjust(image, dh, fs, fv);
}

ImageU8 rotate90(const ImageU8& image, int quarter_turns) {
  const int q = ((quarter_turns % 4) + 4) % 4;
  if (q == 0) return image;
  const int w = image.width(), h = image.height();
  const int ow = (q % 2 == 0) ? w : h;
  const int oh = (q % 2 == 0) ? h : w;
  ImageU8 out(ow, oh);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int nx, ny;
      switch (q) {
        case 1: nx = h - 1 - y; ny = x; break;          // 90 deg counter-clockwise image coords
        case 2: nx = w - 1 - x; ny = h - 1 - y; break;  // 180
        default: nx = y; ny = w - 1 - x; break;         // 270
      }
      for (int c = 0; c < 3; ++c) out.at(nx, ny, c) = image.at(x, y, c);
    }
  }
  return out;
}

ImageU8 flip_horizontal(const ImageU8& image) {
  const int w = image.width(), h = image.height();
  ImageU8 out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) out.at(w - 1 - x, y, c) = image.at(x, y, c);
  return out;
}

ImageU8 crop(const ImageU8& image, int x0, int y0, int width, int height) {
  if (x0 < 0 || y0 < 0 || x0 + width > image.width() || y0 + height > image.height()) {
    throw Error(ErrorCode::image_too_small, "crop window outside image bounds");
  }
  if (x0 == 0 && y0 == 0 && width == image.width() && height == image.height()) return image;
  ImageU8 out(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = image.at(x0 + x, y0 + y, c);
  return out;
}

ImageU8 center_crop(const ImageU8& image, int size) {
  if (image.width() < size || image.height() < size) {
    throw Error(ErrorCode::image_too_small,
                "image " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                    " smaller than " + std::to_string(size));
  }
  return crop(image, (image.width() - size) / 2, (image.height() - size) / 2, size, size);
}

ImageU8 geometric_augment(const ImageU8& image, const GeoAugConfig& cfg, Rng& rng) {
  cfg.validate();
  if (image.width() < cfg.crop_size || image.height() < cfg.crop_size) {
    throw Error(ErrorCode::image_too_small, "image smaller than crop_size");
  }
  // Fixed draw order: rotation, flip, crop offsets.
  const int rot = cfg.rotations[static_cast<size_t>(rng.next_below(cfg.rotations.size()))];
  ImageU8 out = rotate90(image, rot / 90);
  if (cfg.allow_flips && rng.next_bool()) out = flip_horizontal(out);
  const int max_x = out.width() - cfg.crop_size;
  const int max_y = out.height() - cfg.crop_size;
  const int x0 = max_x > 0 ? static_cast<int>(rng.next_below(static_cast<uint64_t>(max_x) + 1)) : 0;
  const int y0 = max_y > 0 ? static_cast<int>(rng.next_below(static_cast<uint64_t>(max_y) + 1)) : 0;
  return crop(out, x0, y0, cfg.crop_size, cfg.crop_size);
}

ImageU8 apply_augmentations(const ImageU8& image, const std::vector<AugmentStep>& pipeline, Rng& rng) {
  ImageU8 out = image;
  for (const auto& step : pipeline) {
    out = std::visit(
        [&](const auto& cfg) {
          using T = std::decay_t<decltype(cfg)>;
          if constexpr (std::is_same_v<T, GeoAugConfig>) {
            return geometric_augment(out, cfg, rng);
          } else {
            return hsv_color_augment(out, cfg, rng);
          }
        },
        step);
  }
  return out;
}

}  // namespace repshift
