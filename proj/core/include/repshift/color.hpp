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

#include <array>
#include <cstdint>
#include <vector>

#include "repshift/image.hpp"

namespace repshift {

// ---------------------------------------------------------------------------
// Optical density (Beer-Lambert). Stain mixing is linear in OD space.
// ---------------------------------------------------------------------------

/// OD for one 8-bit channel value: -log10((v + 1) / 256). Zero at v = 255,
/// strictly decreasing in v, finite everywhere.
inline double od_from_u8(uint8_t v) {
  return -std::log10((static_cast<double>(v) + 1.0) / 256.0);
}

/// Inverse of od_from_u8 on the 8-bit grid; exact round trip for all 256
/// channel values.
inline uint8_t u8_from_od(double od) {
  const double v = 256.0 * std::pow(10.0, -od) - 1.0;
  const double r = std::nearbyint(v);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<uint8_t>(r);
}

/// Per-channel OD image, interleaved like the source RGB image.
std::vector<double> rgb_to_od(const ImageU8& image);

/// Quantizes an interleaved OD buffer back to 8-bit RGB.
ImageU8 od_to_rgb(const std::vector<double>& od, int width, int height);

// ---------------------------------------------------------------------------
// HSV (all components in [0, 1); hue wraps).
// ---------------------------------------------------------------------------

struct Hsv {
  double h, s, v;
};

Hsv rgb_to_hsv(double r, double g, double b);
std::array<double, 3> hsv_to_rgb(const Hsv& hsv);

/// Shifts hue by dh (fraction of the full circle, wrap-around) and scales
/// saturation / value by the given factors (clamped to [0, 1]). One
/// parameter triple per image, applied to every pixel.
ImageU8 apply_hsv_adjust(const ImageU8& image, double hue_shift, double sat_scale, double val_scale);

/// Color cast used by the synthetic domains: hue rotation (degrees) followed
/// by contrast scaling about mid-gray, per RGB channel, on float pixels.
void apply_color_cast(std::vector<double>& rgb_float, double hue_shift_deg, double contrast_scale);

}  // namespace repshift
