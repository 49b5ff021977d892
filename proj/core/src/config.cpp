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

#include "repshift/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "repshift/error.hpp"

namespace repshift {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_quote = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quote = !in_quote;
    if (line[i] == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> parse_list(const std::string& body, const std::string& origin, size_t row) {
  std::vector<std::string> items;
  std::string cur;
  bool in_quote = false;
  for (char c : body) {
    if (c == '"') {
      in_quote = !in_quote;
      cur.push_back(c);
    } else if (c == ',' && !in_quote) {
      const auto t = trim(cur);
      if (!t.empty()) items.push_back(unquote(t));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (in_quote) {
    throw Error(ErrorCode::parse_error, origin + ":" + std::to_string(row) + ": unterminated string");
  }
  const auto t = trim(cur);
  if (!t.empty()) items.push_back(unquote(t));
  return items;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  size_t row = 0;
  while (std::getline(ss, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw Error(ErrorCode::parse_error, origin + ":" + std::to_string(row) + ": empty section name");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::parse_error,
                  origin + ":" + std::to_string(row) + ": expected 'key = value', got '" + line + "'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw Error(ErrorCode::parse_error, origin + ":" + std::to_string(row) + ": empty key or value");
    }
    if (!section.empty()) key = section + "." + key;

    Value v;
    if (value.front() == '[') {
      if (value.back() != ']') {
        throw Error(ErrorCode::parse_error,
                    origin + ":" + std::to_string(row) + ": arrays must close on the same line");
      }
      v.is_list = true;
      v.list = parse_list(value.substr(1, value.size() - 2), origin, row);
    } else {
      v.scalar = unquote(value);
    }
    if (!cfg.values_.emplace(key, std::move(v)).second) {
      throw Error(ErrorCode::parse_error, origin + ":" + std::to_string(row) + ": duplicate key '" + key + "'");
    }
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) != 0; }

const KeyValueConfig::Value& KeyValueConfig::require(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw Error(ErrorCode::invalid_config, origin_ + ": missing required key '" + key + "'");
  }
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  const auto& v = require(key);
  if (v.is_list) throw Error(ErrorCode::invalid_config, "key '" + key + "' is a list, expected scalar");
  return v.scalar;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string s = get_string(key);
  try {
    size_t pos = 0;
    const double d = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_config, "key '" + key + "': '" + s + "' is not a number");
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int64_t KeyValueConfig::get_int(const std::string& key) const {
  const std::string s = get_string(key);
  int64_t out = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw Error(ErrorCode::invalid_config, "key '" + key + "': '" + s + "' is not an integer");
  }
  return out;
}

int64_t KeyValueConfig::get_int(const std::string& key, int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string s = get_string(key);
  if (s == "true") return true;
  if (s == "false") return false;
  throw Error(ErrorCode::invalid_config, "key '" + key + "': expected true/false, got '" + s + "'");
}

std::vector<std::string> KeyValueConfig::get_string_list(const std::string& key) const {
  const auto& v = require(key);
  if (!v.is_list) return {v.scalar};
  return v.list;
}

std::vector<std::string> KeyValueConfig::get_string_list(const std::string& key,
                                                         const std::vector<std::string>& fallback) const {
  return has(key) ? get_string_list(key) : fallback;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
  const auto items = get_string_list(key);
  std::vector<double> out;
  out.reserve(items.size());
  for (const auto& s : items) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(s, &pos));
      if (pos != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_config, "key '" + key + "': '" + s + "' is not a number");
    }
  }
  return out;
}

std::vector<std::string> KeyValueConfig::keys() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [k, _] : values_) out.push_back(k);
  return out;
}

}  // namespace repshift
