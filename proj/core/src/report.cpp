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

#include "repshift/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "repshift/error.hpp"

namespace fs = std::filesystem;

namespace repshift {

namespace {

struct AxisScale {
  double lo, hi;
  double to_px(double v, double px_lo, double px_hi) const {
    const double t = (v - lo) / (hi - lo);
    return px_lo + t * (px_hi - px_lo);
  }
};

AxisScale nice_axis(double lo, double hi) {
  if (hi <= lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.08 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

void write_points_csv(const std::string& path, const std::vector<ReportPoint>& points) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write points CSV: " + path);
  out << "model,transform,domain,repshift,accuracy\n";
  for (const auto& p : points) {
    out << p.model << ',' << p.transform << ',' << p.domain << ',' << p.repshift << ',' << p.accuracy
        << '\n';
  }
}

void write_scatter_svg(const std::string& path, const std::vector<ReportPoint>& points,
                       const LinearFit& fit) {
  constexpr int kWidth = 640, kHeight = 480;
  constexpr double kLeft = 70, kRight = 610, kTop = 30, kBottom = 430;

  double x_lo = points[0].repshift, x_hi = x_lo;
  double y_lo = points[0].accuracy, y_hi = y_lo;
  for (const auto& p : points) {
    x_lo = std::min(x_lo, p.repshift);
    x_hi = std::max(x_hi, p.repshift);
    y_lo = std::min(y_lo, p.accuracy);
    y_hi = std::max(y_hi, p.accuracy);
  }
  const AxisScale xs = nice_axis(x_lo, x_hi);
  const AxisScale ys = nice_axis(y_lo, y_hi);

  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write SVG: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight << "\" y2=\""
      << kBottom << "\" stroke=\"black\"/>\n";
  out << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kBottom
      << "\" stroke=\"black\"/>\n";

  // Axis ticks (five per axis).
  for (int t = 0; t <= 4; ++t) {
    const double xv = xs.lo + (xs.hi - xs.lo) * t / 4.0;
    const double px = xs.to_px(xv, kLeft, kRight);
    out << "  <line x1=\"" << px << "\" y1=\"" << kBottom << "\" x2=\"" << px << "\" y2=\""
        << kBottom + 5 << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << px << "\" y=\"" << kBottom + 20
        << "\" font-size=\"11\" text-anchor=\"middle\">" << std::round(xv * 1000.0) / 1000.0
        << "</text>\n";
    const double yv = ys.lo + (ys.hi - ys.lo) * t / 4.0;
    const double py = ys.to_px(yv, kBottom, kTop);
    out << "  <line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\"" << kLeft << "\" y2=\"" << py
        << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << kLeft - 10 << "\" y=\"" << py + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << std::round(yv * 1000.0) / 1000.0
        << "</text>\n";
  }
  out << "  <text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 10
      << "\" font-size=\"13\" text-anchor=\"middle\">representation shift</text>\n";
  out << "  <text x=\"18\" y=\"" << (kTop + kBottom) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (kTop + kBottom) / 2 << ")\">accuracy</text>\n";

  // Regression line clipped to the x range.
  const double y1 = fit.intercept + fit.slope * xs.lo;
  const double y2 = fit.intercept + fit.slope * xs.hi;
  out << "  <line x1=\"" << xs.to_px(xs.lo, kLeft, kRight) << "\" y1=\"" << ys.to_px(y1, kBottom, kTop)
      << "\" x2=\"" << xs.to_px(xs.hi, kLeft, kRight) << "\" y2=\"" << ys.to_px(y2, kBottom, kTop)
      << "\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";

  for (const auto& p : points) {
    out << "  <circle cx=\"" << xs.to_px(p.repshift, kLeft, kRight) << "\" cy=\""
        << ys.to_px(p.accuracy, kBottom, kTop) << "\" r=\"4\" fill=\"#2c6fbb\" fill-opacity=\"0.8\">"
        << "<title>" << p.model << '/' << p.transform << '/' << p.domain << "</title></circle>\n";
  }
  out << "</svg>\n";
}

CorrelationReport correlation_report(const std::vector<ReportPoint>& points, const std::string& out_dir) {
  if (points.size() < 3) {
    throw Error(ErrorCode::too_few_points,
                "correlation report needs at least 3 cells, have " + std::to_string(points.size()));
  }
  std::vector<double> r(points.size()), acc(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    r[i] = points[i].repshift;
    acc[i] = points[i].accuracy;
  }
  const double r_lo = *std::min_element(r.begin(), r.end());
  const double r_hi = *std::max_element(r.begin(), r.end());
  if (r_hi - r_lo <= 0.0) {
    throw Error(ErrorCode::zero_variance, "representation shift has zero variance over the cells");
  }

  CorrelationReport rep;
  const LinearFit fit = ols_fit(r, acc);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.pearson_r = pearson_correlation(r, acc);
  rep.n_points = static_cast<int>(points.size());

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  rep.scatter_svg_path = (fs::path(out_dir) / "scatter.svg").string();
  rep.points_csv_path = (fs::path(out_dir) / "points.csv").string();
  write_scatter_svg(rep.scatter_svg_path, points, fit);
  write_points_csv(rep.points_csv_path, points);
  return rep;
}

}  // namespace repshift
