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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "repshift/image.hpp"

namespace repshift {

/// Two-stain color model in optical-density space. Columns are unit-norm
/// stain vectors, hematoxylin first, eosin second; max_concentrations holds
/// the robust (99th percentile) per-stain concentration used as the
/// normalization scale.
struct StainProfile {
  // Row-major 3x2: stain_matrix[channel][stain].
  std::array<std::array<double, 2>, 3> stain_matrix{};
  std::array<double, 2> max_concentrations{1.0, 1.0};

  std::array<double, 3> column(int stain) const {
    return {stain_matrix[0][stain], stain_matrix[1][stain], stain_matrix[2][stain]};
  }

  /// Unit columns, non-negative entries, positive concentrations.
  bool is_valid(double tol = 1e-6) const;

  std::string to_json() const;
  static StainProfile from_json(const std::string& json_text);
  static StainProfile load(const std::string& path);
  void save(const std::string& path) const;

  /// Canonical Ruifrok H&E vectors; also the NMF starting point.
  static StainProfile canonical_he();
};

struct StainSeparationOptions {
  double background_od_threshold = 0.15;  // pixels with smaller OD norm are background
  double min_tissue_fraction = 0.05;
  double sparsity_lambda = 0.1;
  int max_iterations = 200;
  double tolerance = 1e-4;                // on reconstruction RMSE change
  double degenerate_cosine = 0.999;
  double percentile = 99.0;
};

/// Sparse non-negative stain separation: factorizes the foreground OD cloud
/// as W*H (W >= 0 with unit columns, H >= 0 with an L1 penalty) by
/// alternating exact two-variable updates, then orders columns so the
/// blue-dominant stain (hematoxylin) comes first.
///
/// Throws Error(insufficient_tissue) when too little of the image is
/// foreground and Error(degenerate_factorization) when the recovered stain
/// vectors are near-parallel.
StainProfile estimate_stain_profile(const ImageU8& image, const StainSeparationOptions& opts = {});

/// Re-renders `image` with the target profile: per-pixel non-negative least
/// squares against the source stain matrix, concentration rescaling by the
/// ratio of robust maxima, reconstruction through the target stain matrix.
/// Background pixels pass through unchanged. When `source` is absent it is
/// estimated from the image itself.
ImageU8 stain_normalize(const ImageU8& image, const StainProfile& target,
                        const std::optional<StainProfile>& source = std::nullopt,
                        const StainSeparationOptions& opts = {});

/// OD-space core of stain_normalize, exposed for diagnostics: input pixels
/// as interleaved OD triples, output likewise (no quantization, no
/// background pass-through).
std::vector<double> stain_normalize_od(const std::vector<double>& od_pixels,
                                       const StainProfile& source, const StainProfile& target);

/// Per-pixel non-negative least-squares concentrations against a stain
/// matrix. Input: interleaved OD triples; output: interleaved concentration
/// pairs.
std::vector<double> stain_concentrations(const std::vector<double>& od_pixels,
                                         const StainProfile& profile);

}  // namespace repshift
