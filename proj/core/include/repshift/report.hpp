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

#include <string>
#include <vector>

#include "repshift/stats.hpp"

namespace repshift {

/// One grid cell reduced to the two reported quantities.
struct ReportPoint {
  std::string model;
  std::string transform;
  std::string domain;
  double repshift = 0.0;
  double accuracy = 0.0;
};

struct CorrelationReport {
  double pearson_r = 0.0;
  double slope = 0.0;      // accuracy = intercept + slope * repshift
  double intercept = 0.0;
  int n_points = 0;
  std::string scatter_svg_path;
  std::string points_csv_path;
};

/// OLS of accuracy on representation shift across cells, plus a scatter plot
/// (SVG) and the underlying points (CSV) under out_dir. Needs >= 3 points
/// and non-constant shift values.
CorrelationReport correlation_report(const std::vector<ReportPoint>& points, const std::string& out_dir);

void write_scatter_svg(const std::string& path, const std::vector<ReportPoint>& points,
                       const LinearFit& fit);
void write_points_csv(const std::string& path, const std::vector<ReportPoint>& points);

}  // namespace repshift
