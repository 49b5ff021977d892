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

#include "repshift/loader.hpp"

#include <algorithm>
#include <cmath>

#include "repshift/augment.hpp"
#include "repshift/error.hpp"

namespace repshift {

ImageU8 FileImageProvider::load(const PatchDataset& ds, size_t record_idx) {
  return read_png(ds.resolve(ds.records[record_idx]));
}

ImageU8 CachingImageProvider::load(const PatchDataset& ds, size_t record_idx) {
  const std::string path = ds.resolve(ds.records[record_idx]);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = cache_.find(path);
    if (it != cache_.end()) return it->second;
  }
  ImageU8 img = read_png(path);
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.emplace(path, std::move(img)).first->second;
}

void image_to_sample(const ImageU8& image, int size, float* dst) {
  const ImageU8* src = &image;
  ImageU8 cropped;
  if (image.width() != size || image.height() != size) {
    cropped = center_crop(image, size);
    src = &cropped;
  }
  const size_t plane = static_cast<size_t>(size) * size;
  const uint8_t* p = src->data();
  for (size_t i = 0; i < plane; ++i) {
    for (int c = 0; c < 3; ++c) {
      dst[c * plane + i] = (static_cast<float>(p[3 * i + c]) - 127.5f) / 127.5f;
    }
  }
}

ImageU8 sample_to_image(const float* src, int size) {
  ImageU8 out(size, size);
  const size_t plane = static_cast<size_t>(size) * size;
  uint8_t* p = out.data();
  for (size_t i = 0; i < plane; ++i) {
    for (int c = 0; c < 3; ++c) {
      const float v = src[c * plane + i] * 127.5f + 127.5f;
      p[3 * i + c] = static_cast<uint8_t>(std::clamp(std::nearbyint(v), 0.0f, 255.0f));
    }
  }
  return out;
}

}  // namespace repshift
