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

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "repshift/image.hpp"
#include "repshift/rng.hpp"
#include "repshift/stain.hpp"

namespace testutil {

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("repshift_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

/// Independent Wasserstein-1 oracle: integrates |Fa^-1(q) - Fb^-1(q)| over
/// quantile levels, stepping through the merged breakpoints i/n and j/m.
/// Deliberately a different route from the library implementation (which
/// integrates the CDF difference over merged sample values).
inline double wasserstein_quantile_oracle(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const size_t n = a.size(), m = b.size();
  std::vector<double> breaks{0.0, 1.0};
  for (size_t i = 1; i < n; ++i) breaks.push_back(static_cast<double>(i) / n);
  for (size_t j = 1; j < m; ++j) breaks.push_back(static_cast<double>(j) / m);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  double total = 0.0;
  for (size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double q0 = breaks[k], q1 = breaks[k + 1];
    const double qm = 0.5 * (q0 + q1);
    const double qa = a[std::min(n - 1, static_cast<size_t>(qm * n))];
    const double qb = b[std::min(m - 1, static_cast<size_t>(qm * m))];
    total += std::abs(qa - qb) * (q1 - q0);
  }
  return total;
}

/// Random uniform RGB image.
inline repshift::ImageU8 random_image(repshift::Rng& rng, int w, int h) {
  repshift::ImageU8 img(w, h);
  for (size_t i = 0; i < img.size(); ++i) {
    img.data()[i] = static_cast<uint8_t>(rng.next_below(256));
  }
  return img;
}

/// Renders an image through the two-stain forward model from known
/// concentration fields; in-span by construction.
inline repshift::ImageU8 stain_forward_image(const repshift::StainProfile& profile,
                                             const std::vector<double>& hema,
                                             const std::vector<double>& eosin, int size) {
  std::vector<double> od(static_cast<size_t>(size) * size * 3);
  for (int i = 0; i < size * size; ++i) {
    for (int c = 0; c < 3; ++c) {
      od[3 * static_cast<size_t>(i) + c] =
          profile.stain_matrix[c][0] * hema[i] + profile.stain_matrix[c][1] * eosin[i];
    }
  }
  repshift::ImageU8 img(size, size);
  for (size_t i = 0; i < od.size(); ++i) {
    img.data()[i] = repshift::u8_from_od(od[i]);
  }
  return img;
}

/// Sparse two-stain concentration fields: most pixels carry one dominant
/// stain, a few are background.
inline void random_sparse_concentrations(repshift::Rng& rng, int size, std::vector<double>& hema,
                                         std::vector<double>& eosin) {
  hema.assign(static_cast<size_t>(size) * size, 0.0);
  eosin.assign(static_cast<size_t>(size) * size, 0.0);
  for (int i = 0; i < size * size; ++i) {
    const double u = rng.next_double();
    if (u < 0.1) continue;  // background
    if (u < 0.55) {
      hema[i] = rng.uniform(0.3, 1.2);
      eosin[i] = rng.uniform(0.0, 0.08);
    } else {
      eosin[i] = rng.uniform(0.3, 1.2);
      hema[i] = rng.uniform(0.0, 0.08);
    }
  }
}

inline double column_cosine(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double dot = 0, na = 0, nb = 0;
  for (int i = 0; i < 3; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / std::sqrt(na * nb);
}

}  // namespace testutil
