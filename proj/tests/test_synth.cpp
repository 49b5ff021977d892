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

#include <fstream>
#include <sstream>

#include "repshift/error.hpp"
#include "repshift/synth.hpp"
#include "testutil.hpp"

using namespace repshift;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("benchmark is balanced and slide-structured") {
  testutil::TempDir dir("synth_balance");
  SynthConfig cfg;
  cfg.n_patches = 60;
  cfg.img_size = 32;
  cfg.n_slides = 6;
  cfg.seed = 5;
  const PatchDataset ds = synth_benchmark(cfg, dir.str());

  CHECK(ds.size() == 60);
  size_t tumor = 0;
  for (const auto& r : ds.records) tumor += r.label == Label::tumor;
  CHECK(tumor == 30);
  CHECK(ds.slide_ids().size() == 6);
  for (const auto& r : ds.records) CHECK(r.domain_id == "hue+0_c1.00");

  // Manifest reloads to the identical record list.
  const PatchDataset back = load_manifest(dir.file("manifest.csv"));
  REQUIRE(back.size() == ds.size());
  for (size_t i = 0; i < ds.size(); ++i) CHECK(back.records[i].path == ds.records[i].path);
}

TEST_CASE("same config and seed give identical pixels") {
  testutil::TempDir a("synth_det_a"), b("synth_det_b");
  SynthConfig cfg;
  cfg.n_patches = 8;
  cfg.img_size = 48;
  cfg.n_slides = 2;
  cfg.seed = 99;
  cfg.hue_shift_deg = 25.0;
  synth_benchmark(cfg, a.str());
  synth_benchmark(cfg, b.str());
  for (int i = 0; i < 8; ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "images/patch_%05d.png", i);
    CHECK(slurp(a.file(name)) == slurp(b.file(name)));
  }
}

TEST_CASE("structure is identical across domains before the color cast") {
  testutil::TempDir a("synth_precast_a"), b("synth_precast_b");
  SynthConfig cfg;
  cfg.n_patches = 10;
  cfg.img_size = 48;
  cfg.n_slides = 2;
  cfg.seed = 31;
  cfg.pre_cast = true;

  cfg.hue_shift_deg = 0.0;
  synth_benchmark(cfg, a.str());
  cfg.hue_shift_deg = 40.0;
  cfg.contrast_scale = 0.8;
  synth_benchmark(cfg, b.str());

  for (int i = 0; i < 10; ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "images/patch_%05d.png", i);
    CHECK(slurp(a.file(name)) == slurp(b.file(name)));
  }

  // Recorded class-conditional texture parameters are domain-independent.
  CHECK(slurp(a.file("generator_params.json")) == slurp(b.file("generator_params.json")));
}

TEST_CASE("cast actually changes pixels") {
  SynthConfig plain;
  plain.img_size = 48;
  SynthConfig cast = plain;
  cast.hue_shift_deg = 40.0;
  const ImageU8 x = synth_patch(plain, Label::tumor, 77);
  const ImageU8 y = synth_patch(cast, Label::tumor, 77);
  CHECK(x.size() == y.size());
  size_t diff = 0;
  for (size_t i = 0; i < x.size(); ++i) diff += x.data()[i] != y.data()[i];
  CHECK(diff > x.size() / 10);
}

TEST_CASE("degenerate configs are rejected") {
  testutil::TempDir dir("synth_bad");
  SynthConfig cfg;
  cfg.n_patches = 0;
  CHECK_THROWS_AS(synth_benchmark(cfg, dir.str()), Error);

  SynthConfig cfg2;
  cfg2.contrast_scale = 0.0;
  CHECK_THROWS_AS(synth_benchmark(cfg2, dir.str()), Error);
}

TEST_CASE("classes separate on a simple pixel statistic") {
  // Brute-force oracle classifier: mean green-channel optical density
  // (hematoxylin and eosin both absorb green, tumor carries far more stain).
  // Threshold fitted on one half, accuracy measured on the other.
  SynthConfig cfg;
  cfg.img_size = 96;
  auto statistic = [&](int i, Label label) {
    const ImageU8 img = synth_patch(cfg, label, derive_seed(4242, i));
    double sum = 0.0;
    const size_t n = img.size() / 3;
    for (size_t p = 0; p < n; ++p) sum += od_from_u8(img.data()[3 * p + 1]);
    return sum / static_cast<double>(n);
  };

  double worst_tumor = 1e9, best_non = -1e9;
  for (int i = 0; i < 100; ++i) {
    const Label label = (i % 2 == 0) ? Label::tumor : Label::non_tumor;
    const double stat = statistic(i, label);
    if (label == Label::tumor) {
      worst_tumor = std::min(worst_tumor, stat);
    } else {
      best_non = std::max(best_non, stat);
    }
  }
  CHECK(worst_tumor > best_non);  // the fit set is linearly separated outright
  const double threshold = 0.5 * (worst_tumor + best_non);

  size_t correct = 0;
  const int eval_n = 200;
  for (int i = 100; i < 100 + eval_n; ++i) {
    const Label label = (i % 2 == 0) ? Label::tumor : Label::non_tumor;
    const double stat = statistic(i, label);
    const Label predicted = stat > threshold ? Label::tumor : Label::non_tumor;
    correct += predicted == label;
  }
  CHECK(static_cast<double>(correct) / eval_n >= 0.99);
}
