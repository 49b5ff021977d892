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

#include "repshift/activations.hpp"

#include <zlib.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "repshift/error.hpp"

namespace repshift {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'H', 'F'};
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

std::vector<double> ActivationMatrix::column(int j) const {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = values[static_cast<size_t>(i) * l + j];
  return out;
}

void save_activations(const ActivationMatrix& m, const std::string& path) {
  if (m.n < 1 || m.l < 1 || m.values.size() != static_cast<size_t>(m.n) * m.l) {
    throw Error(ErrorCode::invalid_config, "activation matrix dimensions are inconsistent");
  }

  std::string payload;
  payload.resize(m.values.size() * sizeof(float));
  static_assert(sizeof(float) == 4);
  std::memcpy(payload.data(), m.values.data(), payload.size());

  std::string buf;
  buf.append(kMagic, 4);
  buf.push_back(static_cast<char>(kVersion));
  put_u32(buf, static_cast<uint32_t>(m.n));
  put_u32(buf, static_cast<uint32_t>(m.l));
  buf += payload;
  const uint32_t crc = static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size())));
  put_u32(buf, crc);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write activations: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::io_error, "write failed: " + path);

  nlohmann::json sidecar;
  sidecar["layer_id"] = m.layer_id;
  sidecar["dataset_name"] = m.dataset_name;
  sidecar["model_fingerprint"] = m.model_fingerprint;
  std::ofstream side(path + ".json");
  if (!side) throw Error(ErrorCode::io_error, "cannot write sidecar: " + path + ".json");
  side << sidecar.dump(2) << '\n';
}

ActivationMatrix load_activations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open activations: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  // 4 magic + 1 version + 4 n + 4 l ... payload ... 4 crc
  if (buf.size() < 13) throw Error(ErrorCode::truncated_file, "file too small: " + path);
  if (std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::bad_magic, "not an activation dump: " + path);
  }
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  const uint8_t version = p[4];
  if (version != kVersion) {
    throw Error(ErrorCode::parse_error, "unsupported format version " + std::to_string(version));
  }
  const uint32_t n = read_u32(p + 5);
  const uint32_t l = read_u32(p + 9);
  const uint64_t expected_payload = static_cast<uint64_t>(n) * l * sizeof(float);
  if (buf.size() != 13 + expected_payload + 4) {
    throw Error(ErrorCode::truncated_file,
                "header says " + std::to_string(n) + "x" + std::to_string(l) + " but file holds " +
                    std::to_string(buf.size() - 17) + " payload bytes");
  }
  const uint32_t stored_crc = read_u32(p + 13 + expected_payload);
  const uint32_t actual_crc = static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(buf.data() + 13), static_cast<uInt>(expected_payload)));
  if (stored_crc != actual_crc) {
    throw Error(ErrorCode::checksum_mismatch, "payload CRC32 mismatch in " + path);
  }

  ActivationMatrix m;
  m.n = static_cast<int>(n);
  m.l = static_cast<int>(l);
  m.values.resize(static_cast<size_t>(n) * l);
  std::memcpy(m.values.data(), buf.data() + 13, expected_payload);

  const std::string sidecar_path = path + ".json";
  if (std::filesystem::exists(sidecar_path)) {
    std::ifstream side(sidecar_path);
    try {
      nlohmann::json j = nlohmann::json::parse(side);
      m.layer_id = j.value("layer_id", "");
      m.dataset_name = j.value("dataset_name", "");
      m.model_fingerprint = j.value("model_fingerprint", "");
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse_error, "sidecar JSON: " + std::string(e.what()));
    }
  }
  return m;
}

ActivationMatrix extract_mean_activations(const TrainedModel& model, const PatchDataset& ds,
                                          ImageProvider& images, const std::string& layer) {
  if (ds.empty()) throw Error(ErrorCode::empty_dataset, "cannot extract activations from an empty dataset");
  const int layer_idx = model.resolve_layer(layer);

  TrainedModel scratch = model;  // private forward caches
  const int size = model.spec.input_size;

  ActivationMatrix out;
  out.layer_id = scratch.net.layer_name(layer_idx);
  out.dataset_name = ds.name;
  out.model_fingerprint = model.fingerprint();

  constexpr int kBatch = 32;
  const size_t n = ds.size();
  bool first = true;
  for (size_t start = 0; start < n; start += kBatch) {
    const int b = static_cast<int>(std::min<size_t>(kBatch, n - start));
    nn::Tensor x(b, {3, size, size});
    for (int j = 0; j < b; ++j) {
      const ImageU8 img = images.load(ds, start + j);
      image_to_sample(img, size, x.sample(j));
    }
    const nn::Tensor feat = scratch.net.forward_to(x, layer_idx, nn::Mode::kInfer);
    const nn::Shape s = feat.shape();
    if (first) {
      out.n = static_cast<int>(n);
      out.l = s.c;
      out.values.resize(n * static_cast<size_t>(s.c));
      first = false;
    }
    const size_t plane = static_cast<size_t>(s.h) * s.w;
    for (int j = 0; j < b; ++j) {
      const float* f = feat.sample(j);
      float* row = out.values.data() + (start + j) * out.l;
      for (int c = 0; c < s.c; ++c) {
        double sum = 0.0;
        const float* fp = f + c * plane;
        for (size_t k = 0; k < plane; ++k) sum += fp[k];
        row[c] = static_cast<float>(sum / static_cast<double>(plane));
      }
    }
  }
  return out;
}

}  // namespace repshift
