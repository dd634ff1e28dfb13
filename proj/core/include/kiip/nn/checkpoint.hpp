// Copyright 2026 The KIIP Authors
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

#include <filesystem>
#include <string>
#include <string_view>

#include "kiip/nn/model.hpp"

namespace kiip::nn {

// Layout: 8-byte magic "KIIPNN1\0", u64 descriptor length, JSON architecture
// descriptor, u64 parameter count, then that many little-endian f64 values
// (per layer: weights row-major, then bias; then nearest-neighbor features).
std::string serialize_checkpoint(const ClassifierModel& model);

// Throws kFormatError with a byte offset on any inconsistency.
ClassifierModel parse_checkpoint(std::string_view bytes);

void save_checkpoint(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_checkpoint(const std::filesystem::path& path);

}  // namespace kiip::nn
