// Copyright 2026 The dialplan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>

#include "dialplan/value_model.hpp"

namespace dialplan {

// Binary layout, little-endian throughout:
//   "DXQH"                      4-byte magic
//   u32 version                 currently 1
//   u64 step                    gradient steps taken
//   u32 layer_count             3
//   layer_count x (u32 rows, u32 cols)
//   online head, then target head: for each layer the weights as f64 in
//   row-major order followed by the rows bias values.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const QHeadParams& params, const std::string& path);

// Throws IoError when the file is missing or truncated and
// FormatVersionMismatch when the magic or version differ.
QHeadParams load_checkpoint(const std::string& path);

}  // namespace dialplan
