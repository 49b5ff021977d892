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

#include <string>

#include "repshift/models.hpp"

namespace repshift {

/// Single-file versioned checkpoint: magic "RSCK", version byte, JSON header
/// (spec, layer_map, training_meta, parameter manifest), float32 weight
/// payload, CRC32 of the payload.
void save_checkpoint(const std::string& path, const TrainedModel& model);
TrainedModel load_checkpoint(const std::string& path);

}  // namespace repshift
