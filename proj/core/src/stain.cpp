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

#include "repshift/stain.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "repshift/color.hpp"
#include "repshift/error.hpp"

namespace repshift {

namespace {

using Matrix32 = Eigen::Matrix<double, 3, 2>;
using Vector3 = Eigen::Vector3d;
using Vector2 = Eigen::Vector2d;

Matrix32 to_eigen(const StainProfile& p) {
  Matrix32 w;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 2; ++c) w(r, c) = p.stain_matrix[r][c];
  return w;
}

// Exact non-negative least squares for two variables with an optional L1
// shift: argmin_{h>=0} 0.5*||od - W h||^2 + lambda*(h0 + h1). Solves the
// unconstrained normal equations, then falls back to the three boundary
// cases when the interior solution leaves the cone.
Vector2 nnls2(const Matrix32& w, const Vector3& od, double lambda) {
  const double a = w.col(0).squaredNorm();
  const double b = w.col(0).dot(w.col(1));
  const double c = w.col(1).squaredNorm();
  const double r0 = w.col(0).dot(od) - lambda;
  const double r1 = w.col(1).dot(od) - lambda;

  const double det = a * c - b * b;
  if (det > 1e-12) {
    const double h0 = (c * r0 - b * r1) / det;
    const double h1 = (a * r1 - b * r0) / det;
    if (h0 >= 0.0 && h1 >= 0.0) return {h0, h1};
  }
  // Boundary candidates: one stain only, or none.
  const double h0_only = a > 0 ? std::max(0.0, r0 / a) : 0.0;
  const double h1_only = c > 0 ? std::max(0.0, r1 / c) : 0.0;
  const auto objective = [&](double h0, double h1) {
    return 0.5 * (od - w.col(0) * h0 - w.col(1) * h1).squaredNorm() + lambda * (h0 + h1);
  };
  const double f0 = objective(h0_only, 0.0);
  const double f1 = objective(0.0, h1_only);
  if (f0 <= f1) return {h0_only, 0.0};
  return {0.0, h1_only};
}

double percentile_of(std::vector<double> values, double pct) {
  if (values.empty()) return 0.0;
  const double rank = pct / 100.0 * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(rank);
  const size_t hi = std::min(lo + 1, values.size() - 1);
  std::nth_element(values.begin(), values.begin() + lo, values.end());
  const double vlo = values[lo];
  std::nth_element(values.begin(), values.begin() + hi, values.end());
  const double vhi = values[hi];
  return vlo + (vhi - vlo) * (rank - static_cast<double>(lo));
}

// Hematoxylin renders blue: larger blue share of transmitted light.
double blue_transmittance_share(const Vector3& stain) {
  const double tr = std::pow(10.0, -stain(0));
  const double tg = std::pow(10.0, -stain(1));
  const double tb = std::pow(10.0, -stain(2));
  return tb / (tr + tg + tb);
}

}  // namespace

bool StainProfile::is_valid(double tol) const {
  for (int c = 0; c < 2; ++c) {
    double norm2 = 0.0;
    for (int r = 0; r < 3; ++r) {
      if (stain_matrix[r][c] < 0.0) return false;
      norm2 += stain_matrix[r][c] * stain_matrix[r][c];
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > tol) return false;
    if (!(max_concentrations[c] > 0.0)) return false;
  }
  return true;
}

StainProfile StainProfile::canonical_he() {
  StainProfile p;
  const Vector3 h = Vector3(0.650, 0.704, 0.286).normalized();
  const Vector3 e = Vector3(0.072, 0.990, 0.105).normalized();
  for (int r = 0; r < 3; ++r) {
    p.stain_matrix[r][0] = h(r);
    p.stain_matrix[r][1] = e(r);
  }
  p.max_concentrations = {1.0, 1.0};
  return p;
}

std::string StainProfile::to_json() const {
  nlohmann::json j;
  j["stain_matrix"] = {
      {stain_matrix[0][0], stain_matrix[0][1]},
      {stain_matrix[1][0], stain_matrix[1][1]},
      {stain_matrix[2][0], stain_matrix[2][1]},
  };
  j["max_concentrations"] = {max_concentrations[0], max_concentrations[1]};
  return j.dump(2);
}

StainProfile StainProfile::from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("stain profile JSON: ") + e.what());
  }
  StainProfile p;
  try {
    const auto& m = j.at("stain_matrix");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 2; ++c) p.stain_matrix[r][c] = m.at(r).at(c).get<double>();
    const auto& mc = j.at("max_concentrations");
    p.max_concentrations = {mc.at(0).get<double>(), mc.at(1).get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("stain profile JSON: ") + e.what());
  }
  if (!p.is_valid(1e-3)) {
    throw Error(ErrorCode::parse_error, "stain profile violates invariants (unit columns, >= 0)");
  }
  return p;
}

StainProfile StainProfile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open stain profile: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void StainProfile::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write stain profile: " + path);
  out << to_json() << '\n';
}

StainProfile estimate_stain_profile(const ImageU8& image, const StainSeparationOptions& opts) {
  const std::vector<double> od = rgb_to_od(image);
  const size_t n_pixels = od.size() / 3;
  if (n_pixels == 0) throw Error(ErrorCode::insufficient_tissue, "empty image");

  // Foreground = OD magnitude above the background threshold.
  std::vector<Vector3> fg;
  fg.reserve(n_pixels / 2);
  for (size_t i = 0; i < n_pixels; ++i) {
    const Vector3 p(od[3 * i], od[3 * i + 1], od[3 * i + 2]);
    if (p.norm() > opts.background_od_threshold) fg.push_back(p);
  }
  const double tissue_fraction = static_cast<double>(fg.size()) / static_cast<double>(n_pixels);
  if (tissue_fraction < opts.min_tissue_fraction) {
    throw Error(ErrorCode::insufficient_tissue,
                "foreground fraction " + std::to_string(tissue_fraction) + " below " +
                    std::to_string(opts.min_tissue_fraction));
  }

  const size_t p = fg.size();
  Eigen::Matrix3Xd od_mat(3, p);
  for (size_t i = 0; i < p; ++i) od_mat.col(i) = fg[i];

  Matrix32 w = to_eigen(StainProfile::canonical_he());
  Eigen::Matrix2Xd h(2, p);
  double prev_rmse = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    // Concentration step: exact sparse NNLS per pixel.
    for (size_t i = 0; i < p; ++i) {
      h.col(i) = nnls2(w, od_mat.col(i), opts.sparsity_lambda);
    }

    // Dictionary step: per-column least squares against the other column's
    // residual, clamped to the non-negative cone. A column whose
    // concentration row has collapsed keeps its direction.
    for (int k = 0; k < 2; ++k) {
      const int o = 1 - k;
      const double hh = h.row(k).squaredNorm();
      if (hh < 1e-12) continue;
      Vector3 col = (od_mat - w.col(o) * h.row(o)) * h.row(k).transpose() / hh;
      col = col.cwiseMax(0.0);
      const double norm = col.norm();
      if (norm < 1e-12) continue;
      w.col(k) = col / norm;
    }

    const double rmse = std::sqrt((od_mat - w * h).squaredNorm() / static_cast<double>(3 * p));
    if (std::abs(prev_rmse - rmse) < opts.tolerance) break;
    prev_rmse = rmse;
  }

  const double cosine = w.col(0).dot(w.col(1)) / (w.col(0).norm() * w.col(1).norm());
  if (std::abs(cosine) > opts.degenerate_cosine) {
    throw Error(ErrorCode::degenerate_factorization,
                "stain vectors near-parallel (|cos| = " + std::to_string(std::abs(cosine)) + ")");
  }

  // Final concentrations for the robust maxima use the converged dictionary.
  std::vector<double> c0(p), c1(p);
  for (size_t i = 0; i < p; ++i) {
    const Vector2 hc = nnls2(w, od_mat.col(i), opts.sparsity_lambda);
    c0[i] = hc(0);
    c1[i] = hc(1);
  }

  StainProfile out;
  const bool first_is_hema = blue_transmittance_share(w.col(0)) >= blue_transmittance_share(w.col(1));
  const int hema = first_is_hema ? 0 : 1;
  const int eos = 1 - hema;
  for (int r = 0; r < 3; ++r) {
    out.stain_matrix[r][0] = w(r, hema);
    out.stain_matrix[r][1] = w(r, eos);
  }
  const double p0 = percentile_of(hema == 0 ? c0 : c1, opts.percentile);
  const double p1 = percentile_of(eos == 0 ? c0 : c1, opts.percentile);
  out.max_concentrations = {std::max(p0, 1e-6), std::max(p1, 1e-6)};
  return out;
}

std::vector<double> stain_concentrations(const std::vector<double>& od_pixels,
                                         const StainProfile& profile) {
  const Matrix32 w = to_eigen(profile);
  const size_t n = od_pixels.size() / 3;
  std::vector<double> out(2 * n);
  for (size_t i = 0; i < n; ++i) {
    const Vector3 od(od_pixels[3 * i], od_pixels[3 * i + 1], od_pixels[3 * i + 2]);
    const Vector2 h = nnls2(w, od, 0.0);
    out[2 * i] = h(0);
    out[2 * i + 1] = h(1);
  }
  return out;
}

std::vector<double> stain_normalize_od(const std::vector<double>& od_pixels,
                                       const StainProfile& source, const StainProfile& target) {
  const Matrix32 wt = to_eigen(target);
  const std::vector<double> conc = stain_concentrations(od_pixels, source);
  const double scale0 = target.max_concentrations[0] / source.max_concentrations[0];
  const double scale1 = target.max_concentrations[1] / source.max_concentrations[1];
  const size_t n = od_pixels.size() / 3;
  std::vector<double> out(od_pixels.size());
  for (size_t i = 0; i < n; ++i) {
    const Vector2 h(conc[2 * i] * scale0, conc[2 * i + 1] * scale1);
    const Vector3 od = wt * h;
    out[3 * i] = od(0);
    out[3 * i + 1] = od(1);
    out[3 * i + 2] = od(2);
  }
  return out;
}

ImageU8 stain_normalize(const ImageU8& image, const StainProfile& target,
                        const std::optional<StainProfile>& source_opt,
                        const StainSeparationOptions& opts) {
  if (!target.is_valid(1e-3)) throw Error(ErrorCode::invalid_config, "invalid target stain profile");
  const StainProfile source = source_opt ? *source_opt : estimate_stain_profile(image, opts);

  const std::vector<double> od = rgb_to_od(image);
  const std::vector<double> od_out = stain_normalize_od(od, source, target);

  ImageU8 out(image.width(), image.height());
  const size_t n = od.size() / 3;
  for (size_t i = 0; i < n; ++i) {
    const Vector3 p(od[3 * i], od[3 * i + 1], od[3 * i + 2]);
    if (p.norm() <= opts.background_od_threshold) {
      for (int c = 0; c < 3; ++c) out.data()[3 * i + c] = image.data()[3 * i + c];
    } else {
      for (int c = 0; c < 3; ++c) out.data()[3 * i + c] = u8_from_od(od_out[3 * i + c]);
    }
  }
  return out;
}

}  // namespace repshift
