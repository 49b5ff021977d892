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

#include "repshift/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "repshift/error.hpp"

namespace repshift {

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::empty_dataset, "wasserstein_1d requires non-empty sample sets");
  }
  for (double v : a) {
    if (!std::isfinite(v)) throw Error(ErrorCode::parse_error, "non-finite sample in first set");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw Error(ErrorCode::parse_error, "non-finite sample in second set");
  }

  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());

  // Walk the merged sorted samples; between consecutive distinct values the
  // two empirical CDFs are constant, so the area integral is a finite sum.
  size_t i = 0, j = 0;
  double dist = 0.0;
  double prev = std::min(sa.front(), sb.front());
  while (i < sa.size() || j < sb.size()) {
    double x;
    if (i < sa.size() && j < sb.size()) {
      x = std::min(sa[i], sb[j]);
    } else if (i < sa.size()) {
      x = sa[i];
    } else {
      x = sb[j];
    }
    const double fa = static_cast<double>(i) / na;
    const double fb = static_cast<double>(j) / nb;
    dist += std::abs(fa - fb) * (x - prev);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    prev = x;
  }
  return dist;
}

}  // namespace repshift
