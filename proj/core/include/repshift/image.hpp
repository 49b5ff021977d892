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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace repshift {

/// Interleaved 8-bit RGB image.
class ImageU8 {
 public:
  ImageU8() = default;
  ImageU8(int width, int height)
      : width_(width), height_(height), pixels_(static_cast<size_t>(width) * height * 3, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  uint8_t* data() { return pixels_.data(); }
  const uint8_t* data() const { return pixels_.data(); }

  uint8_t& at(int x, int y, int c) { return pixels_[(static_cast<size_t>(y) * width_ + x) * 3 + c]; }
  uint8_t at(int x, int y, int c) const { return pixels_[(static_cast<size_t>(y) * width_ + x) * 3 + c]; }

  bool operator==(const ImageU8& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> pixels_;
};

/// PNG I/O (8-bit RGB; gray and RGBA inputs are expanded / flattened).
ImageU8 read_png(const std::string& path);
void write_png(const std::string& path, const ImageU8& image);

}  // namespace repshift
