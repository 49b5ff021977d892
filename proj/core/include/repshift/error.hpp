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

#include <stdexcept>
#include <string>

namespace repshift {

enum class ErrorCode {
  io_error,
  parse_error,
  invalid_config,
  unknown_label,
  duplicate_path,
  empty_dataset,
  too_few_slides,
  slide_overlap,
  image_too_small,
  insufficient_tissue,
  degenerate_factorization,
  unknown_layer,
  invalid_filter,
  dead_filter,
  filter_count_mismatch,
  layer_mismatch,
  model_mismatch,
  bad_magic,
  truncated_file,
  checksum_mismatch,
  too_few_points,
  zero_variance,
  internal,
};

const char* error_code_name(ErrorCode code);

/// All recoverable failures surface as Error; the code gives the CLI (and
/// tests) a stable identifier, what() carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::invalid_config: return "invalid_config";
    case ErrorCode::unknown_label: return "unknown_label";
    case ErrorCode::duplicate_path: return "duplicate_path";
    case ErrorCode::empty_dataset: return "empty_dataset";
    case ErrorCode::too_few_slides: return "too_few_slides";
    case ErrorCode::slide_overlap: return "slide_overlap";
    case ErrorCode::image_too_small: return "image_too_small";
    case ErrorCode::insufficient_tissue: return "insufficient_tissue";
    case ErrorCode::degenerate_factorization: return "degenerate_factorization";
    case ErrorCode::unknown_layer: return "unknown_layer";
    case ErrorCode::invalid_filter: return "invalid_filter";
    case ErrorCode::dead_filter: return "dead_filter";
    case ErrorCode::filter_count_mismatch: return "filter_count_mismatch";
    case ErrorCode::layer_mismatch: return "layer_mismatch";
    case ErrorCode::model_mismatch: return "model_mismatch";
    case ErrorCode::bad_magic: return "bad_magic";
    case ErrorCode::truncated_file: return "truncated_file";
    case ErrorCode::checksum_mismatch: return "checksum_mismatch";
    case ErrorCode::too_few_points: return "too_few_points";
    case ErrorCode::zero_variance: return "zero_variance";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

}  // namespace repshift
