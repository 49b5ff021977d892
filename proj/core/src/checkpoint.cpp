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

#include "repshift/checkpoint.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "repshift/error.hpp"

namespace repshift {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'C', 'K'};
constexpr uint8_t kVersion = 1;

void put_u32(std::string& buf, uint32_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
  buf.push_back(static_cast<char>((v >> 16) & 0xff));
  buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

}  // namespace

void save_checkpoint(const std::string& path, const TrainedModel& model) {
  nlohmann::json header;
  header["spec"] = {
      {"arch", arch_to_string(model.spec.arch)},
      {"input_size", model.spec.input_size},
      {"n_classes", model.spec.n_classes},
      {"dropout_rate", model.spec.dropout_rate},
  };
  header["layer_map"] = model.layer_map;
  header["training_meta"] = {
      {"seed", model.meta.seed},
      {"epochs_run", model.meta.epochs_run},
      {"best_val_accuracy", model.meta.best_val_accuracy},
  };

  auto params = const_cast<nn::Sequential&>(model.net).params();
  nlohmann::json plist = nlohmann::json::array();
  std::string payload;
  for (const auto* p : params) {
    plist.push_back({{"name", p->name}, {"count", p->w.size()}});
    const size_t offset = payload.size();
    payload.resize(offset + p->w.size() * sizeof(float));
    std::memcpy(payload.data() + offset, p->w.data(), p->w.size() * sizeof(float));
  }
  header["params"] = plist;

  const std::string header_str = header.dump();
  std::string buf;
  buf.append(kMagic, 4);
  buf.push_back(static_cast<char>(kVersion));
  put_u32(buf, static_cast<uint32_t>(header_str.size()));
  buf += header_str;
  buf += payload;
  const uint32_t crc = static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size())));
  put_u32(buf, crc);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write checkpoint: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::io_error, "write failed: " + path);
}

TrainedModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open checkpoint: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() < 9) throw Error(ErrorCode::truncated_file, "checkpoint too small: " + path);
  if (std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::bad_magic, "not a checkpoint file: " + path);
  }
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  if (p[4] != kVersion) {
    throw Error(ErrorCode::parse_error, "unsupported checkpoint version " + std::to_string(p[4]));
  }
  const uint32_t header_len = read_u32(p + 5);
  if (buf.size() < 9 + static_cast<size_t>(header_len) + 4) {
    throw Error(ErrorCode::truncated_file, "checkpoint header truncated: " + path);
  }

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(buf.substr(9, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, "checkpoint header JSON: " + std::string(e.what()));
  }

  ModelSpec spec;
  spec.arch = arch_from_string(header.at("spec").at("arch").get<std::string>());
  spec.input_size = header.at("spec").at("input_size").get<int>();
  spec.n_classes = header.at("spec").at("n_classes").get<int>();
  spec.dropout_rate = header.at("spec").at("dropout_rate").get<double>();

  TrainedModel model = build_model(spec, 0);
  model.layer_map = header.at("layer_map").get<std::map<std::string, std::string>>();
  const auto& meta = header.at("training_meta");
  model.meta.seed = meta.at("seed").get<uint64_t>();
  model.meta.epochs_run = meta.at("epochs_run").get<int>();
  model.meta.best_val_accuracy = meta.at("best_val_accuracy").get<double>();

  auto params = model.net.params();
  const auto& plist = header.at("params");
  if (plist.size() != params.size()) {
    throw Error(ErrorCode::parse_error, "checkpoint parameter list does not match architecture");
  }
  size_t payload_bytes = 0;
  for (size_t i = 0; i < params.size(); ++i) {
    if (plist[i].at("name").get<std::string>() != params[i]->name ||
        plist[i].at("count").get<size_t>() != params[i]->w.size()) {
      throw Error(ErrorCode::parse_error, "checkpoint parameter mismatch at '" + params[i]->name + "'");
    }
    payload_bytes += params[i]->w.size() * sizeof(float);
  }
  if (buf.size() != 9 + header_len + payload_bytes + 4) {
    throw Error(ErrorCode::truncated_file, "checkpoint payload truncated: " + path);
  }

  const char* payload = buf.data() + 9 + header_len;
  const uint32_t stored_crc = read_u32(p + 9 + header_len + payload_bytes);
  const uint32_t actual_crc = static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(payload), static_cast<uInt>(payload_bytes)));
  if (stored_crc != actual_crc) {
    throw Error(ErrorCode::checksum_mismatch, "checkpoint CRC32 mismatch: " + path);
  }

  size_t offset = 0;
  for (auto* param : params) {
    std::memcpy(param->w.data(), payload + offset, param->w.size() * sizeof(float));
    offset += param->w.size() * sizeof(float);
  }
  return model;
}

}  // namespace repshift
