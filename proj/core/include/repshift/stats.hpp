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

#include <span>

namespace repshift {

double mean_of(std::span<const double> v);
/// Sample standard deviation (ddof = 1); 0 for fewer than two values.
double stddev_of(std::span<const double> v);

/// Throws Error(zero_variance) when either input is constant.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
/// Ordinary least squares of y on x. Throws Error(zero_variance) when x is
/// constant.
LinearFit ols_fit(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation with tie-averaged ranks.
double spearman_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace repshift
