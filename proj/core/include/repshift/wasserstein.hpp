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

/// Exact Wasserstein-1 distance between the empirical distributions of two
/// sample sets. Sample counts may differ. In one dimension the optimal
/// coupling is the quantile coupling, so the distance reduces to the area
/// between the two empirical CDFs, integrated exactly over the merged
/// sample breakpoints.
///
/// Throws Error(empty_dataset) on an empty input and Error(parse_error) on
/// non-finite values.
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

}  // namespace repshift
