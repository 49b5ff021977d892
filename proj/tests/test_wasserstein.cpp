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

#include <algorithm>
#include <cmath>

#include "repshift/error.hpp"
#include "repshift/rng.hpp"
#include "repshift/wasserstein.hpp"
#include "testutil.hpp"

using repshift::Error;
using repshift::ErrorCode;
using repshift::Rng;
using repshift::wasserstein_1d;

namespace {

std::vector<double> random_samples(Rng& rng, size_t max_len = 200) {
  const size_t n = 1 + rng.next_below(max_len);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-10.0, 10.0);
  return v;
}

}  // namespace

TEST_CASE("identical sample sets have zero distance") {
  const std::vector<double> a{0.4, -2.0, 3.5, 3.5, 7.0};
  CHECK(wasserstein_1d(a, a) == 0.0);

  // Equal empirical CDFs with different multiplicities are also identical.
  const std::vector<double> x{1.0, 2.0};
  const std::vector<double> x2{1.0, 1.0, 2.0, 2.0};
  CHECK(wasserstein_1d(x, x2) == 0.0);
}

TEST_CASE("point masses") {
  CHECK(wasserstein_1d(std::vector<double>{3.0}, std::vector<double>{7.5}) == doctest::Approx(4.5).epsilon(1e-12));
}

TEST_CASE("known two-sample values") {
  // Equal sizes: mean of sorted pairwise differences.
  CHECK(wasserstein_1d(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 0.0}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  // Unequal sizes: piecewise quantile integration, |0-0.5|*0.5 + |1-0.5|*0.5.
  CHECK(wasserstein_1d(std::vector<double>{0.0, 1.0}, std::vector<double>{0.5}) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("errors on empty or non-finite input") {
  const std::vector<double> ok{1.0};
  CHECK_THROWS_AS(wasserstein_1d({}, ok), Error);
  CHECK_THROWS_AS(wasserstein_1d(ok, {}), Error);
  const std::vector<double> bad{std::nan("")};
  CHECK_THROWS_AS(wasserstein_1d(ok, bad), Error);
  const std::vector<double> inf{std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(wasserstein_1d(inf, ok), Error);
}

TEST_CASE("matches the quantile-integral oracle on random pairs") {
  Rng rng(20260809);
  for (int rep = 0; rep < 500; ++rep) {
    auto a = random_samples(rng);
    auto b = random_samples(rng);
    const double expected = testutil::wasserstein_quantile_oracle(a, b);
    CHECK(wasserstein_1d(a, b) == doctest::Approx(expected).epsilon(0).scale(1.0));
    CHECK(std::abs(wasserstein_1d(a, b) - expected) < 1e-9);
  }
}

TEST_CASE("equal-size inputs equal the mean absolute sorted difference") {
  Rng rng(7);
  for (int rep = 0; rep < 100; ++rep) {
    const size_t n = 1 + rng.next_below(128);
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = rng.uniform(-10.0, 10.0);
    for (auto& x : b) x = rng.uniform(-10.0, 10.0);
    auto sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double expected = 0.0;
    for (size_t i = 0; i < n; ++i) expected += std::abs(sa[i] - sb[i]);
    expected /= static_cast<double>(n);
    const double got = wasserstein_1d(a, b);
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("metric axioms on random triples") {
  Rng rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    const auto a = random_samples(rng, 64);
    const auto b = random_samples(rng, 64);
    const auto c = random_samples(rng, 64);
    const double dab = wasserstein_1d(a, b);
    const double dba = wasserstein_1d(b, a);
    const double dac = wasserstein_1d(a, c);
    const double dcb = wasserstein_1d(c, b);

    CHECK(dab >= 0.0);
    CHECK(std::abs(dab - dba) < 1e-9);
    CHECK(wasserstein_1d(a, a) == 0.0);
    CHECK(dab <= dac + dcb + 1e-9);
  }
}

TEST_CASE("shift invariance and scale equivariance") {
  Rng rng(123);
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = random_samples(rng, 64);
    const auto b = random_samples(rng, 64);
    const double base = wasserstein_1d(a, b);

    const double shift = rng.uniform(-5.0, 5.0);
    auto as = a, bs = b;
    for (auto& x : as) x += shift;
    for (auto& x : bs) x += shift;
    CHECK(std::abs(wasserstein_1d(as, bs) - base) < 1e-9);

    const double k = rng.uniform(-3.0, 3.0);
    auto ak = a, bk = b;
    for (auto& x : ak) x *= k;
    for (auto& x : bk) x *= k;
    const double scaled = wasserstein_1d(ak, bk);
    CHECK(scaled == doctest::Approx(std::abs(k) * base).epsilon(1e-9));
  }
}
