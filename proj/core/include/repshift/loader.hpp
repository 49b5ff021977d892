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

#include <map>
#include <mutex>

#include "repshift/dataset.hpp"
#include "repshift/image.hpp"
#include "repshift/tensor.hpp"

namespace repshift {

/// Pixel access behind the training / evaluation / extraction loops. Tests
/// wrap it to log which records an operation touched.
class ImageProvider {
 public:
  virtual ~ImageProvider() = default;
  virtual ImageU8 load(const PatchDataset& ds, size_t record_idx) = 0;
};

class FileImageProvider : public ImageProvider {
 public:
  ImageU8 load(const PatchDataset& ds, size_t record_idx) override;
};

/// Reads each file once; subsequent loads come from memory. Thread-safe.
class CachingImageProvider : public ImageProvider {
 public:
  ImageU8 load(const PatchDataset& ds, size_t record_idx) override;

 private:
  std::mutex mutex_;
  std::map<std::string, ImageU8> cache_;
};

/// Pixels to [-1, 1] floats, interleaved RGB to planar CHW. Images larger
/// than `size` are center-cropped; smaller ones are an error.
void image_to_sample(const ImageU8& image, int size, float* dst);

/// Inverse of the value mapping (clamped), planar CHW floats to an image.
ImageU8 sample_to_image(const float* src, int size);

}  // namespace repshift
