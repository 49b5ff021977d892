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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace repshift {

/// Flat `key = value` config file: scalars (string, number, bool), string /
/// number arrays in brackets, `#` comments, optional `[section]` headers that
/// prefix keys as `section.key`. A deliberate TOML subset; files written for
/// it are valid TOML.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int64_t get_int(const std::string& key) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_string_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key,
                                           const std::vector<std::string>& fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;

  std::vector<std::string> keys() const;

 private:
  struct Value {
    std::string scalar;
    std::vector<std::string> list;
    bool is_list = false;
  };
  const Value& require(const std::string& key) const;

  std::map<std::string, Value> values_;
  std::string origin_;
};

}  // namespace repshift
