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

#include "repshift/color.hpp"

#include <algorithm>
#include <cmath>

namespace repshift {

std::vector<double> rgb_to_od(const ImageU8& image) {
  std::vector<double> od(image.size());
  const uint8_t* p = image.data();
  for (size_t i = 0; i < od.size(); ++i) od[i] = od_from_u8(p[i]);
  return od;
}

ImageU8 od_to_rgb(const std::vector<double>& od, int width, int height) {
  ImageU8 image(width, height);
  uint8_t* p = image.data();
  for (size_t i = 0; i < od.size(); ++i) p[i] = u8_from_od(od[i]);
  return image;
}

Hsv rgb_to_hsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  Hsv out{0.0, 0.0, mx};
  if (delta <= 0.0 || mx <= 0.0) return out;
  out.s = delta / mx;
  double h;
  if (mx == r) {
    h = (g - b) / delta;
  } else if (mx == g) {
    h = 2.0 + (b - r) / delta;
  } else {
    h = 4.0 + (r - g) / delta;
  }
  h /= 6.0;
  if (h < 0.0) h += 1.0;
  out.h = h;
  return out;
}

std::array<double, 3> hsv_to_rgb(const Hsv& hsv) {
  const double v = hsv.v;
  if (hsv.s <= 0.0) return {v, v, v};
  double h = hsv.h - std::floor(hsv.h);
  h *= 6.0;
  const int sector = std::min(5, static_cast<int>(h));
  const double f = h - sector;
  const double p = v * (1.0 - hsv.s);
  const double q = v * (1.0 - hsv.s * f);
  const double t = v * (1.0 - hsv.s * (1.0 - f));
  switch (sector) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

namespace {

inline uint8_t quantize(double v) {
  const double r = std::nearbyint(v * 255.0);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<uint8_t>(r);
}

}  // namespace

ImageU8 apply_hsv_adjust(const ImageU8& image, double hue_shift, double sat_scale, double val_scale) {
  ImageU8 out(image.width(), image.height());
  const uint8_t* src = image.data();
  uint8_t* dst = out.data();
  const size_t n = image.size() / 3;
  for (size_t i = 0; i < n; ++i) {
    Hsv hsv = rgb_to_hsv(src[3 * i] / 255.0, src[3 * i + 1] / 255.0, src[3 * i + 2] / 255.0);
    hsv.h += hue_shift;
    hsv.h -= std::floor(hsv.h);
    hsv.s = std::clamp(hsv.s * sat_scale, 0.0, 1.0);
    hsv.v = std::clamp(hsv.v * val_scale, 0.0, 1.0);
    const auto rgb = hsv_to_rgb(hsv);
    dst[3 * i] = quantize(rgb[0]);
    dst[3 * i + 1] = quantize(rgb[1]);
    dst[3 * i + 2] = quantize(rgb[2]);
  }
  return out;
}

void apply_color_cast(std::vector<double>& rgb_float, double hue_shift_deg, double contrast_scale) {
  const double dh = hue_shift_deg / 360.0;
  const size_t n = rgb_float.size() / 3;
  for (size_t i = 0; i < n; ++i) {
    double r = rgb_float[3 * i], g = rgb_float[3 * i + 1], b = rgb_float[3 * i + 2];
    if (dh != 0.0) {
      Hsv hsv = rgb_to_hsv(r, g, b);
      hsv.h += dh;
      hsv.h -= std::floor(hsv.h);
      const auto rgb = hsv_to_rgb(hsv);
      r = rgb[0];
      g = rgb[1];
      b = rgb[2];
    }
    r = 0.5 + (r - 0.5) * contrast_scale;
    g = 0.5 + (g - 0.5) * contrast_scale;
    b = 0.5 + (b - 0.5) * contrast_scale;
    rgb_float[3 * i] = std::clamp(r, 0.0, 1.0);
    rgb_float[3 * i + 1] = std::clamp(g, 0.0, 1.0);
    rgb_float[3 * i + 2] = std::clamp(b, 0.0, 1.0);
  }
}

}  // namespace repshift
