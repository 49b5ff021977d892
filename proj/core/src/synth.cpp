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

#include "repshift/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "repshift/color.hpp"
#include "repshift/config.hpp"
#include "repshift/error.hpp"
#include "repshift/rng.hpp"
#include "repshift/stain.hpp"

namespace fs = std::filesystem;

namespace repshift {

namespace {

// Class-conditional texture parameters. Tumor: many small, dense
// hematoxylin blobs with a light eosin wash. Non-tumor: few large blobs on
// a strong eosin background. These depend on the class only, never on the
// domain cast.
struct TextureParams {
  double blob_count_min, blob_count_max;
  double blob_radius_min, blob_radius_max;
  double blob_amp_min, blob_amp_max;
  double eosin_base_min, eosin_base_max;
  double eosin_wave_amp;
};

TextureParams texture_params(Label label) {
  if (label == Label::tumor) {
    return {42.0, 60.0, 2.2, 3.8, 0.75, 1.15, 0.12, 0.28, 0.08};
  }
  return {6.0, 12.0, 4.5, 7.5, 0.55, 0.95, 0.45, 0.75, 0.16};
}

nlohmann::json texture_params_json(Label label) {
  const TextureParams t = texture_params(label);
  return nlohmann::json{
      {"blob_count", {t.blob_count_min, t.blob_count_max}},
      {"blob_radius", {t.blob_radius_min, t.blob_radius_max}},
      {"blob_amplitude", {t.blob_amp_min, t.blob_amp_max}},
      {"eosin_base", {t.eosin_base_min, t.eosin_base_max}},
      {"eosin_wave_amplitude", t.eosin_wave_amp},
  };
}

}  // namespace

SynthConfig SynthConfig::from_config(const KeyValueConfig& cfg) {
  SynthConfig c;
  c.n_patches = static_cast<int>(cfg.get_int("n_patches", c.n_patches));
  c.img_size = static_cast<int>(cfg.get_int("img_size", c.img_size));
  c.n_slides = static_cast<int>(cfg.get_int("n_slides", c.n_slides));
  c.hue_shift_deg = cfg.get_double("hue_shift_deg", c.hue_shift_deg);
  c.contrast_scale = cfg.get_double("contrast_scale", c.contrast_scale);
  c.seed = static_cast<uint64_t>(cfg.get_int("seed", 0));
  c.domain_id = cfg.get_string("domain_id", "");
  return c;
}

std::string SynthConfig::derived_domain_id() const {
  if (!domain_id.empty()) return domain_id;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "hue%+g_c%.2f", hue_shift_deg, contrast_scale);
  return buf;
}

void SynthConfig::validate() const {
  if (n_patches <= 0) throw Error(ErrorCode::invalid_config, "n_patches must be positive");
  if (img_size < 16) throw Error(ErrorCode::invalid_config, "img_size must be at least 16");
  if (n_slides <= 0) throw Error(ErrorCode::invalid_config, "n_slides must be positive");
  if (contrast_scale <= 0) throw Error(ErrorCode::invalid_config, "contrast_scale must be positive");
}

ImageU8 synth_patch(const SynthConfig& config, Label label, uint64_t patch_seed) {
  const int s = config.img_size;
  const TextureParams t = texture_params(label);
  Rng rng(patch_seed);

  // Hematoxylin field: sum of Gaussian bumps.
  std::vector<double> hema(static_cast<size_t>(s) * s, 0.0);
  const int blobs = static_cast<int>(std::lround(rng.uniform(t.blob_count_min, t.blob_count_max)));
  for (int b = 0; b < blobs; ++b) {
    const double cx = rng.uniform(0.0, s);
    const double cy = rng.uniform(0.0, s);
    const double r = rng.uniform(t.blob_radius_min, t.blob_radius_max);
    const double amp = rng.uniform(t.blob_amp_min, t.blob_amp_max);
    const double inv2r2 = 1.0 / (2.0 * r * r);
    const int reach = static_cast<int>(std::ceil(3.0 * r));
    const int x0 = std::max(0, static_cast<int>(cx) - reach);
    const int x1 = std::min(s - 1, static_cast<int>(cx) + reach);
    const int y0 = std::max(0, static_cast<int>(cy) - reach);
    const int y1 = std::min(s - 1, static_cast<int>(cy) + reach);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        hema[static_cast<size_t>(y) * s + x] += amp * std::exp(-d2 * inv2r2);
      }
    }
  }

  // Eosin field: smooth low-frequency wash.
  const double base = rng.uniform(t.eosin_base_min, t.eosin_base_max);
  const double phase_x = rng.uniform(0.0, 2.0 * M_PI);
  const double phase_y = rng.uniform(0.0, 2.0 * M_PI);
  const double freq_x = rng.uniform(1.0, 2.5) * 2.0 * M_PI / s;
  const double freq_y = rng.uniform(1.0, 2.5) * 2.0 * M_PI / s;

  const StainProfile he = StainProfile::canonical_he();
  std::vector<double> rgb(static_cast<size_t>(s) * s * 3);
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      const size_t i = static_cast<size_t>(y) * s + x;
      const double ch = std::clamp(hema[i], 0.0, 2.2);
      const double ce = std::clamp(
          base + t.eosin_wave_amp * (std::sin(freq_x * x + phase_x) + std::sin(freq_y * y + phase_y)),
          0.0, 2.2);
      for (int c = 0; c < 3; ++c) {
        const double od = he.stain_matrix[c][0] * ch + he.stain_matrix[c][1] * ce;
        rgb[3 * i + c] = std::clamp((256.0 * std::pow(10.0, -od) - 1.0) / 255.0, 0.0, 1.0);
      }
    }
  }

  if (!config.pre_cast) {
    apply_color_cast(rgb, config.hue_shift_deg, config.contrast_scale);
  }

  ImageU8 out(s, s);
  for (size_t i = 0; i < rgb.size(); ++i) {
    const double q = std::nearbyint(rgb[i] * 255.0);
    out.data()[i] = static_cast<uint8_t>(std::clamp(q, 0.0, 255.0));
  }
  return out;
}

PatchDataset synth_benchmark(const SynthConfig& config, const std::string& out_dir) {
  config.validate();

  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "images", ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create output directory: " + out_dir);

  const std::string domain = config.derived_domain_id();
  const int per_slide = (config.n_patches + config.n_slides - 1) / config.n_slides;

  PatchDataset ds;
  ds.root = out_dir;
  ds.name = fs::path(out_dir).filename().string();
  ds.records.reserve(config.n_patches);

  for (int i = 0; i < config.n_patches; ++i) {
    const Label label = (i % 2 == 0) ? Label::tumor : Label::non_tumor;
    const ImageU8 img = synth_patch(config, label, derive_seed(config.seed, static_cast<uint64_t>(i)));

    char name[64];
    std::snprintf(name, sizeof(name), "images/patch_%05d.png", i);
    write_png((fs::path(out_dir) / name).string(), img);

    PatchRecord r;
    r.path = name;
    r.label = label;
    char slide[32];
    std::snprintf(slide, sizeof(slide), "slide_%03d", i / per_slide);
    r.slide_id = slide;
    r.domain_id = domain;
    ds.records.push_back(std::move(r));
  }

  save_manifest((fs::path(out_dir) / "manifest.csv").string(), ds);

  nlohmann::json params;
  params["tumor"] = texture_params_json(Label::tumor);
  params["non_tumor"] = texture_params_json(Label::non_tumor);
  std::ofstream pf(fs::path(out_dir) / "generator_params.json");
  pf << params.dump(2) << '\n';

  return ds;
}

}  // namespace repshift
