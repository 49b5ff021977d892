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

#include "repshift/augment.hpp"
#include "repshift/error.hpp"
#include "testutil.hpp"

using namespace repshift;

TEST_CASE("zero-delta hsv augmentation is the identity within 1/255") {
  Rng img_rng(1);
  HsvJitterConfig cfg;
  cfg.hue_delta = 0.0;
  cfg.sat_scale_delta = 0.0;
  cfg.val_scale_delta = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const ImageU8 img = testutil::random_image(img_rng, 24, 24);
    Rng rng(rep);
    const ImageU8 out = hsv_color_augment(img, cfg, rng);
    for (size_t i = 0; i < img.size(); ++i) {
      CHECK(std::abs(static_cast<int>(out.data()[i]) - static_cast<int>(img.data()[i])) <= 1);
    }
  }
}

TEST_CASE("identity geometric config reproduces the input exactly") {
  Rng img_rng(2);
  GeoAugConfig cfg;
  cfg.allow_flips = false;
  cfg.rotations = {0};
  cfg.crop_size = 32;
  for (int rep = 0; rep < 100; ++rep) {
    const ImageU8 img = testutil::random_image(img_rng, 32, 32);
    Rng rng(rep);
    const ImageU8 out = geometric_augment(img, cfg, rng);
    CHECK(out == img);
  }
}

TEST_CASE("geometric augmentation enforces the shape contract") {
  Rng img_rng(3);
  const ImageU8 img = testutil::random_image(img_rng, 48, 40);
  GeoAugConfig cfg;
  cfg.crop_size = 32;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const ImageU8 out = geometric_augment(img, cfg, rng);
    CHECK(out.width() == 32);
    CHECK(out.height() == 32);
  }
}

TEST_CASE("augmentations are deterministic in the seed") {
  Rng img_rng(4);
  const ImageU8 img = testutil::random_image(img_rng, 40, 40);
  GeoAugConfig geo;
  geo.crop_size = 24;
  HsvJitterConfig hsv;

  Rng r1(77), r2(77);
  CHECK(geometric_augment(img, geo, r1) == geometric_augment(img, geo, r2));
  Rng r3(78), r4(78);
  CHECK(hsv_color_augment(img, hsv, r3) == hsv_color_augment(img, hsv, r4));
}

TEST_CASE("image smaller than crop size is an error") {
  Rng img_rng(5);
  const ImageU8 img = testutil::random_image(img_rng, 16, 16);
  GeoAugConfig cfg;
  cfg.crop_size = 32;
  Rng rng(0);
  try {
    geometric_augment(img, cfg, rng);
    FAIL("expected image_too_small");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::image_too_small);
  }
}

TEST_CASE("rotations are exact permutations") {
  Rng img_rng(6);
  const ImageU8 img = testutil::random_image(img_rng, 20, 20);
  CHECK(rotate90(img, 0) == img);
  CHECK(rotate90(rotate90(img, 2), 2) == img);
  CHECK(rotate90(rotate90(rotate90(rotate90(img, 1), 1), 1), 1) == img);
  CHECK(flip_horizontal(flip_horizontal(img)) == img);
  // 90-degree rotation moves the top-left corner pixel correctly.
  const ImageU8 r = rotate90(img, 1);
  CHECK(r.at(0, 0, 0) == img.at(19, 0, 0));
}

TEST_CASE("invalid configs are rejected") {
  GeoAugConfig no_rot;
  no_rot.rotations = {};
  CHECK_THROWS_AS(no_rot.validate(), Error);
  GeoAugConfig bad_angle;
  bad_angle.rotations = {45};
  CHECK_THROWS_AS(bad_angle.validate(), Error);
  HsvJitterConfig bad_hue;
  bad_hue.hue_delta = 0.7;
  CHECK_THROWS_AS(bad_hue.validate(), Error);
}

TEST_CASE("pipeline applies steps in order deterministically") {
  Rng img_rng(7);
  const ImageU8 img = testutil::random_image(img_rng, 32, 32);
  GeoAugConfig geo;
  geo.crop_size = 24;
  HsvJitterConfig hsv;
  const std::vector<AugmentStep> pipeline{AugmentStep{hsv}, AugmentStep{geo}};
  Rng r1(5), r2(5);
  const ImageU8 a = apply_augmentations(img, pipeline, r1);
  const ImageU8 b = apply_augmentations(img, pipeline, r2);
  CHECK(a == b);
  CHECK(a.width() == 24);
}
