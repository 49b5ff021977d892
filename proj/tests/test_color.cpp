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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "repshift/color.hpp"
#include "repshift/rng.hpp"
#include "testutil.hpp"

using namespace repshift;

TEST_CASE("optical density endpoints") {
  CHECK(od_from_u8(255) == doctest::Approx(0.0));
  // I + 1 = 25.6 gives exactly one decade of absorption.
  CHECK(-std::log10(25.6 / 256.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(od_from_u8(25) == doctest::Approx(-std::log10(26.0 / 256.0)).epsilon(1e-12));
}

TEST_CASE("od round trip is exact on the 8-bit grid") {
  for (int v = 0; v < 256; ++v) {
    CHECK(u8_from_od(od_from_u8(static_cast<uint8_t>(v))) == v);
  }
}

TEST_CASE("od is strictly decreasing in channel value") {
  for (int v = 1; v < 256; ++v) {
    CHECK(od_from_u8(static_cast<uint8_t>(v)) < od_from_u8(static_cast<uint8_t>(v - 1)));
  }
}

TEST_CASE("rgb/hsv round trip within quantization") {
  Rng rng(42);
  for (int rep = 0; rep < 2000; ++rep) {
    const double r = rng.next_double(), g = rng.next_double(), b = rng.next_double();
    const Hsv hsv = rgb_to_hsv(r, g, b);
    const auto back = hsv_to_rgb(hsv);
    CHECK(std::abs(back[0] - r) < 1e-9);
    CHECK(std::abs(back[1] - g) < 1e-9);
    CHECK(std::abs(back[2] - b) < 1e-9);
  }
}

TEST_CASE("identity hsv adjustment reproduces the image within 1/255") {
  Rng rng(7);
  const ImageU8 img = testutil::random_image(rng, 31, 17);
  const ImageU8 out = apply_hsv_adjust(img, 0.0, 1.0, 1.0);
  for (size_t i = 0; i < img.size(); ++i) {
    CHECK(std::abs(static_cast<int>(out.data()[i]) - static_cast<int>(img.data()[i])) <= 1);
  }
}

TEST_CASE("one-third hue rotation turns red into green") {
  ImageU8 img(1, 1);
  img.at(0, 0, 0) = 255;
  img.at(0, 0, 1) = 0;
  img.at(0, 0, 2) = 0;
  const ImageU8 out = apply_hsv_adjust(img, 1.0 / 3.0, 1.0, 1.0);
  CHECK(static_cast<int>(out.at(0, 0, 0)) <= 1);
  CHECK(static_cast<int>(out.at(0, 0, 1)) >= 254);
  CHECK(static_cast<int>(out.at(0, 0, 2)) <= 1);
}

TEST_CASE("achromatic pixels are unchanged by pure hue shifts") {
  ImageU8 img(1, 1);
  for (int c = 0; c < 3; ++c) img.at(0, 0, c) = 128;
  const ImageU8 out = apply_hsv_adjust(img, 0.5, 1.0, 1.0);
  for (int c = 0; c < 3; ++c) {
    CHECK(std::abs(static_cast<int>(out.at(0, 0, c)) - 128) <= 1);
  }
}

TEST_CASE("hue wraps around the circle") {
  ImageU8 img(1, 1);
  img.at(0, 0, 0) = 255;
  img.at(0, 0, 1) = 0;
  img.at(0, 0, 2) = 0;
  const ImageU8 out = apply_hsv_adjust(img, 1.0 - 1e-12, 1.0, 1.0);  // full turn
  CHECK(static_cast<int>(out.at(0, 0, 0)) >= 254);
  CHECK(static_cast<int>(out.at(0, 0, 1)) <= 1);
}

TEST_CASE("color cast contrast scaling pulls toward mid-gray") {
  std::vector<double> rgb{1.0, 0.0, 0.25};
  apply_color_cast(rgb, 0.0, 0.5);
  CHECK(rgb[0] == doctest::Approx(0.75));
  CHECK(rgb[1] == doctest::Approx(0.25));
  CHECK(rgb[2] == doctest::Approx(0.375));
}
