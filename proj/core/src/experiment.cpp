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

#include "repshift/experiment.hpp"

#include <zlib.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "repshift/activations.hpp"
#include "repshift/checkpoint.hpp"
#include "repshift/error.hpp"
#include "repshift/repshift.hpp"
#include "repshift/stain.hpp"

namespace fs = std::filesystem;

namespace repshift {

namespace {

std::string crc32_of_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot checksum: " + path);
  uLong crc = crc32(0L, Z_NULL, 0);
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    crc = crc32(crc, reinterpret_cast<const Bytef*>(buf), static_cast<uInt>(in.gcount()));
    if (in.eof()) break;
  }
  char hex[16];
  std::snprintf(hex, sizeof(hex), "%08lx", static_cast<unsigned long>(crc));
  return hex;
}

/// Records every artifact the grid writes, with a checksum for provenance.
class FileLedger {
 public:
  void record(const std::string& path) {
    const std::string crc = crc32_of_file(path);
    std::lock_guard<std::mutex> lock(mutex_);
    files_.emplace_back(path, crc);
  }
  std::vector<std::pair<std::string, std::string>> take() {
    std::lock_guard<std::mutex> lock(mutex_);
    return std::move(files_);
  }

 private:
  std::mutex mutex_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string domain_name_of(const PatchDataset& ds) { return ds.name; }

// Manifest naming: synthetic datasets all call their manifest
// "manifest.csv", so a stem-only name would collide across domains; fall
// back to the parent directory name.
PatchDataset load_domain_manifest(const std::string& path) {
  PatchDataset ds = load_manifest(path);
  if (ds.name == "manifest") {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.filename().empty()) ds.name = parent.filename().string();
  }
  return ds;
}

struct PreparedData {
  PatchDataset train_domain;                       // dataset trained on (possibly normalized)
  std::vector<PatchDataset> test_domains;          // evaluation datasets (possibly normalized)
  std::vector<AugmentStep> augmentations;          // training-time pipeline
};

// Materializes a stain-normalized copy of a dataset once; reused across
// seeds and models.
PatchDataset materialize_normalized(const PatchDataset& ds, const StainProfile& reference,
                                    const std::string& out_root, FileLedger& ledger) {
  const fs::path root = fs::path(out_root) / "normalized" / ds.name;
  const fs::path manifest_path = root / "manifest.csv";
  if (fs::exists(manifest_path)) {
    PatchDataset cached = load_manifest(manifest_path.string());
    cached.name = ds.name + "_stainnorm";
    return cached;
  }
  fs::create_directories(root / "images");

  PatchDataset out;
  out.root = root.string();
  out.name = ds.name + "_stainnorm";
  out.records.reserve(ds.size());
  FileImageProvider files;
  for (size_t i = 0; i < ds.size(); ++i) {
    const ImageU8 img = files.load(ds, i);
    const ImageU8 norm = stain_normalize(img, reference);
    char name[64];
    std::snprintf(name, sizeof(name), "images/patch_%05zu.png", i);
    const std::string path = (root / name).string();
    write_png(path, norm);
    ledger.record(path);
    PatchRecord r = ds.records[i];
    r.path = name;
    r.domain_id = ds.records[i].domain_id + "+stainnorm";
    out.records.push_back(std::move(r));
  }
  save_manifest(manifest_path.string(), out);
  ledger.record(manifest_path.string());
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& cfg) {
  ExperimentConfig out;
  out.models = cfg.get_string_list("models", out.models);
  out.transforms = cfg.get_string_list("transforms", out.transforms);
  out.train_manifest = cfg.get_string("train_manifest");
  out.test_manifests = cfg.get_string_list("test_manifests");
  out.reference_patch = cfg.get_string("reference_patch", "");
  if (cfg.has("seeds")) {
    out.seeds.clear();
    for (double s : cfg.get_double_list("seeds")) out.seeds.push_back(static_cast<uint64_t>(s));
  }
  out.val_fraction = cfg.get_double("val_fraction", out.val_fraction);
  out.test_fraction = cfg.get_double("test_fraction", out.test_fraction);
  out.input_size = static_cast<int>(cfg.get_int("img_size", out.input_size));
  out.workers = static_cast<int>(cfg.get_int("workers", out.workers));
  out.out_dir = cfg.get_string("out", out.out_dir);

  out.train_template.epochs = static_cast<int>(cfg.get_int("epochs", out.train_template.epochs));
  out.train_template.batch_size = static_cast<int>(cfg.get_int("batch_size", out.train_template.batch_size));
  out.train_template.learning_rate = cfg.get_double("learning_rate", out.train_template.learning_rate);
  out.train_template.momentum = cfg.get_double("momentum", out.train_template.momentum);
  out.train_template.early_stop_patience =
      static_cast<int>(cfg.get_int("patience", out.train_template.early_stop_patience));

  out.hsv.hue_delta = cfg.get_double("hue_delta", out.hsv.hue_delta);
  out.hsv.sat_scale_delta = cfg.get_double("sat_scale_delta", out.hsv.sat_scale_delta);
  out.hsv.val_scale_delta = cfg.get_double("val_scale_delta", out.hsv.val_scale_delta);
  out.geo.crop_size = out.input_size;
  return out;
}

std::string ExperimentConfig::schema() {
  return R"(# experiment grid config (key = value; '#' comments)
models          = ["simple_cnn", "mini_googlenet"]   # architectures to train
transforms      = ["original", "color_aug", "stain_norm"]
                  # also: "pretranslated:<manifest.csv>" for externally
                  # translated training data
train_manifest  = "data/source/manifest.csv"          # training domain
test_manifests  = ["data/shift_a/manifest.csv"]       # evaluation domains
reference_patch = "data/reference.png"                # stain_norm target
seeds           = [1, 2, 3]
val_fraction    = 0.15
test_fraction   = 0.15                                # held-out reference split
img_size        = 96
epochs          = 30
batch_size      = 64
learning_rate   = 0.01
momentum        = 0.9
patience        = 5
hue_delta       = 0.5     # color_aug jitter (fraction of the hue circle)
sat_scale_delta = 0.5
val_scale_delta = 0.5
workers         = 1       # parallel cells; determinism needs 1
out             = "out"
)";
}

void ExperimentConfig::validate() const {
  if (models.empty()) throw Error(ErrorCode::invalid_config, "at least one model required");
  if (transforms.empty()) throw Error(ErrorCode::invalid_config, "at least one transform required");
  if (train_manifest.empty()) throw Error(ErrorCode::invalid_config, "train_manifest required");
  if (test_manifests.empty()) throw Error(ErrorCode::invalid_config, "at least one test domain required");
  if (seeds.empty()) throw Error(ErrorCode::invalid_config, "at least one seed required");
  if (workers < 1) throw Error(ErrorCode::invalid_config, "workers must be >= 1");
  for (const auto& t : transforms) {
    const bool known = t == "original" || t == "color_aug" || t == "stain_norm" ||
                       t.rfind("pretranslated:", 0) == 0;
    if (!known) throw Error(ErrorCode::invalid_config, "unknown transform '" + t + "'");
    if (t == "stain_norm" && reference_patch.empty()) {
      throw Error(ErrorCode::invalid_config, "stain_norm requires reference_patch");
    }
  }
}

std::vector<AggregateCell> ReportBundle::aggregate() const {
  // (model, transform, domain) -> per-seed values.
  std::map<std::tuple<std::string, std::string, std::string>,
           std::pair<std::vector<double>, std::vector<double>>>
      groups;
  for (const auto& cell : cells) {
    if (!cell.error.empty()) continue;
    for (const auto& [domain, acc] : cell.accuracy_by_domain) {
      auto& g = groups[{cell.model, cell.transform, domain}];
      g.first.push_back(acc);
      const auto it = cell.repshift_by_domain.find(domain);
      if (it != cell.repshift_by_domain.end()) g.second.push_back(it->second);
    }
  }
  std::vector<AggregateCell> out;
  out.reserve(groups.size());
  for (const auto& [key, vals] : groups) {
    AggregateCell c;
    c.model = std::get<0>(key);
    c.transform = std::get<1>(key);
    c.domain = std::get<2>(key);
    c.n_seeds = static_cast<int>(vals.first.size());
    c.accuracy_mean = mean_of(vals.first);
    c.accuracy_std = stddev_of(vals.first);
    if (!vals.second.empty()) {
      c.repshift_mean = mean_of(vals.second);
      c.repshift_std = stddev_of(vals.second);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ReportPoint> ReportBundle::report_points() const {
  std::vector<ReportPoint> out;
  for (const auto& c : aggregate()) {
    ReportPoint p;
    p.model = c.model;
    p.transform = c.transform;
    p.domain = c.domain;
    p.accuracy = c.accuracy_mean;
    p.repshift = c.repshift_mean;
    out.push_back(std::move(p));
  }
  return out;
}

std::string ReportBundle::to_json() const {
  nlohmann::json j;
  j["seeds"] = seeds;
  nlohmann::json jcells = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json jc;
    jc["model"] = c.model;
    jc["transform"] = c.transform;
    jc["seed"] = c.seed;
    jc["val_accuracy"] = c.val_accuracy;
    jc["reference_patch_count"] = c.reference_patch_count;
    jc["accuracy_by_domain"] = c.accuracy_by_domain;
    jc["repshift_by_domain"] = c.repshift_by_domain;
    if (!c.error.empty()) jc["error"] = c.error;
    jcells.push_back(std::move(jc));
  }
  j["cells"] = std::move(jcells);

  nlohmann::json agg = nlohmann::json::array();
  for (const auto& c : aggregate()) {
    nlohmann::json ja;
    ja["model"] = c.model;
    ja["transform"] = c.transform;
    ja["domain"] = c.domain;
    ja["accuracy_mean"] = c.accuracy_mean;
    ja["repshift_mean"] = c.repshift_mean;
    ja["n_seeds"] = c.n_seeds;
    if (c.n_seeds >= 2) {
      ja["accuracy_std"] = c.accuracy_std;
      ja["repshift_std"] = c.repshift_std;
    }
    agg.push_back(std::move(ja));
  }
  j["aggregate"] = std::move(agg);

  nlohmann::json prov;
  prov["config"] = config_echo;
  nlohmann::json jfiles = nlohmann::json::array();
  for (const auto& [path, crc] : files) jfiles.push_back({{"path", path}, {"crc32", crc}});
  prov["files"] = std::move(jfiles);
  j["provenance"] = std::move(prov);
  return j.dump(2);
}

ReportBundle ReportBundle::from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("bundle JSON: ") + e.what());
  }
  ReportBundle b;
  try {
    b.seeds = j.at("seeds").get<std::vector<uint64_t>>();
    for (const auto& jc : j.at("cells")) {
      CellResult c;
      c.model = jc.at("model").get<std::string>();
      c.transform = jc.at("transform").get<std::string>();
      c.seed = jc.at("seed").get<uint64_t>();
      c.val_accuracy = jc.at("val_accuracy").get<double>();
      c.reference_patch_count = jc.value("reference_patch_count", 0);
      c.accuracy_by_domain = jc.at("accuracy_by_domain").get<std::map<std::string, double>>();
      c.repshift_by_domain = jc.at("repshift_by_domain").get<std::map<std::string, double>>();
      c.error = jc.value("error", "");
      b.cells.push_back(std::move(c));
    }
    b.config_echo = j.at("provenance").at("config").get<std::string>();
    for (const auto& jf : j.at("provenance").at("files")) {
      b.files.emplace_back(jf.at("path").get<std::string>(), jf.at("crc32").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("bundle JSON: ") + e.what());
  }
  return b;
}

void ReportBundle::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write bundle: " + path);
  out << to_json() << '\n';
}

ReportBundle ReportBundle::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open bundle: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

ReportBundle run_experiment_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.deterministic) nn::set_max_threads(1);

  fs::create_directories(cfg.out_dir);
  FileLedger ledger;

  const PatchDataset base_train = load_domain_manifest(cfg.train_manifest);
  std::vector<PatchDataset> base_tests;
  for (const auto& m : cfg.test_manifests) base_tests.push_back(load_domain_manifest(m));

  // Per-transform data preparation, shared across models and seeds.
  std::map<std::string, PreparedData> prepared;
  for (const auto& t : cfg.transforms) {
    PreparedData data;
    data.augmentations = {cfg.geo};
    if (t == "original") {
      data.train_domain = base_train;
      data.test_domains = base_tests;
    } else if (t == "color_aug") {
      data.train_domain = base_train;
      data.test_domains = base_tests;
      data.augmentations = {AugmentStep{cfg.hsv}, AugmentStep{cfg.geo}};
    } else if (t == "stain_norm") {
      const ImageU8 ref_img = read_png(cfg.reference_patch);
      const StainProfile ref = estimate_stain_profile(ref_img);
      const std::string profile_path = (fs::path(cfg.out_dir) / "normalized").string();
      fs::create_directories(profile_path);
      ref.save(profile_path + "/reference_profile.json");
      ledger.record(profile_path + "/reference_profile.json");
      data.train_domain = materialize_normalized(base_train, ref, cfg.out_dir, ledger);
      for (const auto& ds : base_tests) {
        data.test_domains.push_back(materialize_normalized(ds, ref, cfg.out_dir, ledger));
      }
    } else {  // pretranslated:<manifest>
      data.train_domain = load_domain_manifest(t.substr(std::string("pretranslated:").size()));
      data.test_domains = base_tests;
    }
    prepared.emplace(t, std::move(data));
  }

  // Cell list in deterministic order.
  struct CellJob {
    std::string model, transform;
    uint64_t seed;
  };
  std::vector<CellJob> jobs;
  for (const auto& m : cfg.models)
    for (const auto& t : cfg.transforms)
      for (uint64_t s : cfg.seeds) jobs.push_back({m, t, s});

  std::vector<CellResult> results(jobs.size());

  auto run_cell = [&](size_t job_idx) {
    const CellJob& job = jobs[job_idx];
    CellResult cell;
    cell.model = job.model;
    cell.transform = job.transform;
    cell.seed = job.seed;
    const fs::path cell_dir =
        fs::path(cfg.out_dir) / job.model / job.transform / std::to_string(job.seed);
    try {
      fs::create_directories(cell_dir);
      const PreparedData& data = prepared.at(job.transform);

      SplitSpec split;
      split.train = 1.0 - cfg.val_fraction - cfg.test_fraction;
      split.val = cfg.val_fraction;
      split.test = cfg.test_fraction;
      split.seed = job.seed;
      const auto [train_split, val_split, ref_split] = split_by_slide(data.train_domain, split);

      ModelSpec mspec;
      mspec.arch = arch_from_string(job.model);
      mspec.input_size = cfg.input_size;
      TrainedModel model = build_model(mspec, derive_seed(job.seed, 0x11));

      TrainConfig tc = cfg.train_template;
      tc.seed = job.seed;
      tc.augmentations = data.augmentations;

      CachingImageProvider images;
      const TrainHistory history = train(model, train_split, val_split, tc, images);
      cell.val_accuracy = model.meta.best_val_accuracy;

      save_history_csv((cell_dir / "history.csv").string(), history);
      ledger.record((cell_dir / "history.csv").string());
      save_checkpoint((cell_dir / "checkpoint.rsck").string(), model);
      ledger.record((cell_dir / "checkpoint.rsck").string());

      // Reference distribution: held-out same-domain split, never training
      // patches.
      const ActivationMatrix ref_acts = extract_mean_activations(model, ref_split, images);
      cell.reference_patch_count = ref_acts.n;
      save_activations(ref_acts, (cell_dir / "ref.act").string());
      ledger.record((cell_dir / "ref.act").string());
      ledger.record((cell_dir / "ref.act.json").string());

      nlohmann::json metrics;
      metrics["seed"] = job.seed;
      metrics["val_accuracy"] = cell.val_accuracy;
      metrics["best_epoch"] = history.best_epoch;
      metrics["reference_patch_count"] = ref_acts.n;

      for (const auto& domain : data.test_domains) {
        const EvalResult acc = evaluate_accuracy(model, domain, images);
        const ActivationMatrix target_acts = extract_mean_activations(model, domain, images);
        const RepShiftResult shift = representation_shift(ref_acts, target_acts);
        const std::string dname = domain_name_of(domain);
        cell.accuracy_by_domain[dname] = acc.accuracy;
        cell.repshift_by_domain[dname] = shift.mean_shift;
        const std::string act_path = (cell_dir / (dname + ".act")).string();
        save_activations(target_acts, act_path);
        ledger.record(act_path);
        ledger.record(act_path + ".json");
        metrics["domains"][dname] = {{"accuracy", acc.accuracy},
                                     {"repshift", shift.mean_shift},
                                     {"n_patches", target_acts.n}};
      }

      std::ofstream mf(cell_dir / "metrics.json");
      mf << metrics.dump(2) << '\n';
      mf.close();
      ledger.record((cell_dir / "metrics.json").string());
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    results[job_idx] = std::move(cell);
  };

  const int workers = cfg.deterministic ? 1 : cfg.workers;
  if (workers <= 1) {
    for (size_t i = 0; i < jobs.size(); ++i) run_cell(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) run_cell(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  ReportBundle bundle;
  bundle.cells = std::move(results);
  bundle.seeds = cfg.seeds;
  {
    nlohmann::json echo;
    echo["models"] = cfg.models;
    echo["transforms"] = cfg.transforms;
    echo["train_manifest"] = cfg.train_manifest;
    echo["test_manifests"] = cfg.test_manifests;
    echo["seeds"] = cfg.seeds;
    echo["epochs"] = cfg.train_template.epochs;
    echo["batch_size"] = cfg.train_template.batch_size;
    echo["learning_rate"] = cfg.train_template.learning_rate;
    echo["val_fraction"] = cfg.val_fraction;
    echo["test_fraction"] = cfg.test_fraction;
    echo["input_size"] = cfg.input_size;
    bundle.config_echo = echo.dump();
  }
  bundle.files = ledger.take();
  bundle.save((fs::path(cfg.out_dir) / "bundle.json").string());
  return bundle;
}

}  // namespace repshift
