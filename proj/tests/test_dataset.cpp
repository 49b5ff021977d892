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
#include <set>

#include "repshift/config.hpp"
#include "repshift/dataset.hpp"
#include "repshift/error.hpp"
#include "testutil.hpp"

using namespace repshift;

namespace {

std::string write_manifest(const testutil::TempDir& dir, const std::string& body,
                           const std::string& name = "manifest.csv") {
  const std::string path = dir.file(name);
  std::ofstream out(path);
  out << body;
  return path;
}

PatchDataset make_dataset(int slides, int patches_per_slide) {
  PatchDataset ds;
  ds.root = ".";
  ds.name = "synthetic";
  for (int s = 0; s < slides; ++s) {
    for (int p = 0; p < patches_per_slide; ++p) {
      PatchRecord r;
      r.path = "img_" + std::to_string(s) + "_" + std::to_string(p) + ".png";
      r.label = (p % 2 == 0) ? Label::tumor : Label::non_tumor;
      r.slide_id = "slide" + std::to_string(s);
      r.domain_id = "scanner1";
      ds.records.push_back(r);
    }
  }
  return ds;
}

}  // namespace

TEST_CASE("header-only manifest loads as empty dataset") {
  testutil::TempDir dir("manifest_empty");
  const auto path = write_manifest(dir, "path,label,slide_id,domain_id\n");
  const PatchDataset ds = load_manifest(path);
  CHECK(ds.records.empty());
  CHECK(ds.name == "manifest");
}

TEST_CASE("rows load in order with slide identity preserved") {
  testutil::TempDir dir("manifest_rows");
  const auto path = write_manifest(dir,
                                   "path,label,slide_id,domain_id\n"
                                   "a.png,tumor,s1,d1\n"
                                   "b.png,non_tumor,s1,d1\n"
                                   "c.png,tumor,s2,d1\n");
  const PatchDataset ds = load_manifest(path);
  REQUIRE(ds.records.size() == 3);
  CHECK(ds.records[0].path == "a.png");
  CHECK(ds.records[1].label == Label::non_tumor);
  CHECK(ds.slide_ids() == std::set<std::string>{"s1", "s2"});
}

TEST_CASE("manifest error contracts") {
  testutil::TempDir dir("manifest_errors");

  CHECK_THROWS_WITH_AS(load_manifest(dir.file("missing.csv")), doctest::Contains("cannot open"), Error);

  const auto bad_label = write_manifest(dir, "path,label,slide_id,domain_id\na.png,stroma,s1,d1\n", "l.csv");
  CHECK_THROWS_AS(load_manifest(bad_label), Error);
  try {
    load_manifest(bad_label);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unknown_label);
  }

  const auto bad_cols = write_manifest(dir, "path,label,slide_id,domain_id\na.png,tumor,s1\n", "c.csv");
  try {
    load_manifest(bad_cols);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse_error);
  }

  const auto dup = write_manifest(
      dir, "path,label,slide_id,domain_id\na.png,tumor,s1,d1\na.png,tumor,s2,d1\n", "d.csv");
  try {
    load_manifest(dup);
    FAIL("expected duplicate error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::duplicate_path);
  }

  const auto escape = write_manifest(
      dir, "path,label,slide_id,domain_id\n../a.png,tumor,s1,d1\n", "e.csv");
  CHECK_THROWS_AS(load_manifest(escape), Error);

  const auto bad_header = write_manifest(dir, "path,label,slide\na.png,tumor,s1\n", "h.csv");
  CHECK_THROWS_AS(load_manifest(bad_header), Error);
}

TEST_CASE("manifest save/load round trip") {
  testutil::TempDir dir("manifest_rt");
  PatchDataset ds = make_dataset(3, 4);
  ds.root = dir.str();
  const std::string path = dir.file("again.csv");
  save_manifest(path, ds);
  const PatchDataset back = load_manifest(path);
  REQUIRE(back.records.size() == ds.records.size());
  for (size_t i = 0; i < ds.records.size(); ++i) {
    CHECK(back.records[i].path == ds.records[i].path);
    CHECK(back.records[i].label == ds.records[i].label);
    CHECK(back.records[i].slide_id == ds.records[i].slide_id);
    CHECK(back.records[i].domain_id == ds.records[i].domain_id);
  }
}

TEST_CASE("split partitions records with disjoint slide sets") {
  const PatchDataset ds = make_dataset(10, 7);
  SplitSpec spec;
  spec.train = 0.8;
  spec.val = 0.1;
  spec.test = 0.1;
  spec.seed = 7;
  const auto [train, val, test] = split_by_slide(ds, spec);

  CHECK(train.size() + val.size() + test.size() == ds.size());

  const auto st = train.slide_ids();
  const auto sv = val.slide_ids();
  const auto ss = test.slide_ids();
  for (const auto& s : st) {
    CHECK(sv.count(s) == 0);
    CHECK(ss.count(s) == 0);
  }
  for (const auto& s : sv) CHECK(ss.count(s) == 0);

  std::set<std::string> all;
  all.insert(st.begin(), st.end());
  all.insert(sv.begin(), sv.end());
  all.insert(ss.begin(), ss.end());
  CHECK(all == ds.slide_ids());
}

TEST_CASE("single-slide dataset goes entirely to train when only train is requested") {
  const PatchDataset ds = make_dataset(1, 9);
  SplitSpec spec;
  spec.train = 1.0;
  spec.val = 0.0;
  spec.test = 0.0;
  const auto [train, val, test] = split_by_slide(ds, spec);
  CHECK(train.size() == 9);
  CHECK(val.empty());
  CHECK(test.empty());
}

TEST_CASE("split is deterministic in the seed") {
  const PatchDataset ds = make_dataset(8, 5);
  SplitSpec spec;
  spec.seed = 1234;
  const auto [a1, b1, c1] = split_by_slide(ds, spec);
  const auto [a2, b2, c2] = split_by_slide(ds, spec);
  auto paths = [](const PatchDataset& d) {
    std::vector<std::string> out;
    for (const auto& r : d.records) out.push_back(r.path);
    return out;
  };
  CHECK(paths(a1) == paths(a2));
  CHECK(paths(b1) == paths(b2));
  CHECK(paths(c1) == paths(c2));

  spec.seed = 4321;
  const auto [a3, b3, c3] = split_by_slide(ds, spec);
  CHECK(paths(a1) != paths(a3));  // different shuffle with overwhelming probability
}

TEST_CASE("too few slides for the requested splits") {
  const PatchDataset ds = make_dataset(2, 5);
  SplitSpec spec;  // three non-empty splits, two slides
  try {
    split_by_slide(ds, spec);
    FAIL("expected too_few_slides");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::too_few_slides);
  }
}

TEST_CASE("key-value config parsing") {
  const auto cfg = KeyValueConfig::parse_string(
      "# comment\n"
      "n_patches = 2000\n"
      "hue_shift_deg = 40.5\n"
      "name = \"bench mark\"\n"
      "flag = true\n"
      "models = [\"simple_cnn\", \"mini_googlenet\"]\n"
      "seeds = [1, 2, 3]\n"
      "[section]\n"
      "inner = 5\n");
  CHECK(cfg.get_int("n_patches") == 2000);
  CHECK(cfg.get_double("hue_shift_deg") == doctest::Approx(40.5));
  CHECK(cfg.get_string("name") == "bench mark");
  CHECK(cfg.get_bool("flag", false));
  CHECK(cfg.get_string_list("models") == std::vector<std::string>{"simple_cnn", "mini_googlenet"});
  CHECK(cfg.get_double_list("seeds") == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(cfg.get_int("section.inner") == 5);
  CHECK(cfg.get_int("absent", 9) == 9);
  CHECK_THROWS_AS(cfg.get_int("name"), Error);
  CHECK_THROWS_AS(KeyValueConfig::parse_string("oops\n"), Error);
  CHECK_THROWS_AS(KeyValueConfig::parse_string("a = 1\na = 2\n"), Error);
}
