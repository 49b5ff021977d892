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
#include "repshift/error.hpp"
#include "repshift/rng.hpp"
#include "repshift/stain.hpp"
#include "testutil.hpp"

using namespace repshift;

namespace {

// A ground-truth profile deliberately different from the NMF's canonical
// starting point so recovery is earned, not inherited.
StainProfile ground_truth_profile() {
  StainProfile p;
  const double h[3] = {0.55, 0.72, 0.42};
  const double e[3] = {0.10, 0.85, 0.45};
  double nh = 0, ne = 0;
  for (int i = 0; i < 3; ++i) {
    nh += h[i] * h[i];
    ne += e[i] * e[i];
  }
  nh = std::sqrt(nh);
  ne = std::sqrt(ne);
  for (int i = 0; i < 3; ++i) {
    p.stain_matrix[i][0] = h[i] / nh;
    p.stain_matrix[i][1] = e[i] / ne;
  }
  p.max_concentrations = {1.0, 1.0};
  return p;
}

double mean_abs_error(const ImageU8& a, const ImageU8& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sum += std::abs(static_cast<double>(a.data()[i]) - static_cast<double>(b.data()[i]));
  }
  return sum / static_cast<double>(a.size());
}

}  // namespace

TEST_CASE("profile invariants and JSON round trip") {
  const StainProfile p = StainProfile::canonical_he();
  CHECK(p.is_valid());
  const StainProfile back = StainProfile::from_json(p.to_json());
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 2; ++c)
      CHECK(back.stain_matrix[r][c] == doctest::Approx(p.stain_matrix[r][c]).epsilon(1e-12));
  CHECK_THROWS_AS(StainProfile::from_json("{\"stain_matrix\": 3}"), Error);
}

TEST_CASE("synthetic stain matrix recovery") {
  const StainProfile truth = ground_truth_profile();
  Rng rng(2026);
  std::vector<double> hema, eosin;
  testutil::random_sparse_concentrations(rng, 128, hema, eosin);
  const ImageU8 img = testutil::stain_forward_image(truth, hema, eosin, 128);

  const StainProfile est = estimate_stain_profile(img);
  CHECK(est.is_valid());
  CHECK(testutil::column_cosine(est.column(0), truth.column(0)) >= 0.99);
  CHECK(testutil::column_cosine(est.column(1), truth.column(1)) >= 0.99);
  CHECK(est.max_concentrations[0] > 0.2);
  CHECK(est.max_concentrations[1] > 0.2);
}

TEST_CASE("all-white image has insufficient tissue") {
  ImageU8 img(64, 64);
  std::fill(img.data(), img.data() + img.size(), 255);
  try {
    estimate_stain_profile(img);
    FAIL("expected insufficient_tissue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_tissue);
  }
}

TEST_CASE("single-stain image recovers the active column") {
  const StainProfile truth = ground_truth_profile();
  Rng rng(17);
  std::vector<double> hema, eosin;
  testutil::random_sparse_concentrations(rng, 128, hema, eosin);
  std::fill(eosin.begin(), eosin.end(), 0.0);  // hematoxylin only
  const ImageU8 img = testutil::stain_forward_image(truth, hema, eosin, 128);

  const StainProfile est = estimate_stain_profile(img);
  const double c0 = testutil::column_cosine(est.column(0), truth.column(0));
  const double c1 = testutil::column_cosine(est.column(1), truth.column(0));
  CHECK(std::max(c0, c1) >= 0.99);
  // The second stain is reported but carries almost no concentration.
  const double big = std::max(est.max_concentrations[0], est.max_concentrations[1]);
  const double small = std::min(est.max_concentrations[0], est.max_concentrations[1]);
  CHECK(small <= 0.05 * big);
}

TEST_CASE("hematoxylin column is ordered first") {
  Rng rng(5);
  std::vector<double> hema, eosin;
  testutil::random_sparse_concentrations(rng, 96, hema, eosin);
  const ImageU8 img = testutil::stain_forward_image(StainProfile::canonical_he(), hema, eosin, 96);
  const StainProfile est = estimate_stain_profile(img);
  // Blue share of transmitted light must be larger for column 0.
  auto blue_share = [](const std::array<double, 3>& col) {
    const double tr = std::pow(10.0, -col[0]);
    const double tg = std::pow(10.0, -col[1]);
    const double tb = std::pow(10.0, -col[2]);
    return tb / (tr + tg + tb);
  };
  CHECK(blue_share(est.column(0)) >= blue_share(est.column(1)));
}

TEST_CASE("identity-profile normalization is near-lossless") {
  Rng rng(99);
  std::vector<double> hema, eosin;
  testutil::random_sparse_concentrations(rng, 96, hema, eosin);
  const StainProfile truth = ground_truth_profile();
  StainProfile profile = truth;
  profile.max_concentrations = {1.3, 1.1};
  const ImageU8 img = testutil::stain_forward_image(truth, hema, eosin, 96);

  const ImageU8 out = stain_normalize(img, profile, profile);
  CHECK(out.width() == img.width());
  CHECK(out.height() == img.height());
  CHECK(mean_abs_error(img, out) <= 2.0);  // <= 2/255 in pixel units
}

TEST_CASE("self-estimated normalization is a fixed point") {
  Rng rng(123);
  std::vector<double> hema, eosin;
  testutil::random_sparse_concentrations(rng, 96, hema, eosin);
  const ImageU8 patch = testutil::stain_forward_image(ground_truth_profile(), hema, eosin, 96);

  const StainProfile est = estimate_stain_profile(patch);
  const ImageU8 out = stain_normalize(patch, est);  // source re-estimated internally
  CHECK(mean_abs_error(patch, out) <= 5.0);
}

TEST_CASE("od-space normalization matches the forward model") {
  const StainProfile truth = ground_truth_profile();
  StainProfile source = truth;
  source.max_concentrations = {1.5, 0.9};

  StainProfile target;
  const double t0[3] = {0.7, 0.6, 0.38}, t1[3] = {0.2, 0.9, 0.39};
  double n0 = 0, n1 = 0;
  for (int i = 0; i < 3; ++i) {
    n0 += t0[i] * t0[i];
    n1 += t1[i] * t1[i];
  }
  n0 = std::sqrt(n0);
  n1 = std::sqrt(n1);
  for (int i = 0; i < 3; ++i) {
    target.stain_matrix[i][0] = t0[i] / n0;
    target.stain_matrix[i][1] = t1[i] / n1;
  }
  target.max_concentrations = {2.0, 1.8};

  Rng rng(55);
  const int n = 64;
  std::vector<double> od(3 * n);
  std::vector<double> h(2 * n);
  for (int i = 0; i < n; ++i) {
    h[2 * i] = rng.uniform(0.0, 1.4);
    h[2 * i + 1] = rng.uniform(0.0, 1.4);
    for (int c = 0; c < 3; ++c) {
      od[3 * i + c] =
          source.stain_matrix[c][0] * h[2 * i] + source.stain_matrix[c][1] * h[2 * i + 1];
    }
  }

  const std::vector<double> out = stain_normalize_od(od, source, target);
  const double s0 = target.max_concentrations[0] / source.max_concentrations[0];
  const double s1 = target.max_concentrations[1] / source.max_concentrations[1];
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      const double expected = target.stain_matrix[c][0] * h[2 * i] * s0 +
                              target.stain_matrix[c][1] * h[2 * i + 1] * s1;
      CHECK(out[3 * i + c] == doctest::Approx(expected).epsilon(0).scale(1.0));
      CHECK(std::abs(out[3 * i + c] - expected) < 1e-3);
    }
  }
}

TEST_CASE("background pixels pass through unchanged") {
  Rng rng(321);
  std::vector<double> hema(64 * 64, 0.0), eosin(64 * 64, 0.0);
  for (int i = 0; i < 400; ++i) hema[i] = 1.0;  // small stained corner
  const StainProfile truth = ground_truth_profile();
  const ImageU8 img = testutil::stain_forward_image(truth, hema, eosin, 64);

  StainProfile target = StainProfile::canonical_he();
  target.max_concentrations = {1.0, 1.0};
  StainProfile source = truth;
  const ImageU8 out = stain_normalize(img, target, source);
  // A pure-white pixel is background; stays byte-identical.
  CHECK(out.at(63, 63, 0) == img.at(63, 63, 0));
  CHECK(out.at(63, 63, 1) == img.at(63, 63, 1));
  CHECK(out.at(63, 63, 2) == img.at(63, 63, 2));
}

TEST_CASE("stain_normalize preserves dimensions and 8-bit range") {
  Rng rng(777);
  const ImageU8 img = testutil::random_image(rng, 40, 30);
  StainProfile target = StainProfile::canonical_he();
  const StainProfile source = StainProfile::canonical_he();
  const ImageU8 out = stain_normalize(img, target, source);
  CHECK(out.width() == 40);
  CHECK(out.height() == 30);
}
