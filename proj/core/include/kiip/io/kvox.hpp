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

#include "kiip/pipeline.hpp"

namespace kiip::io {

// KVOX grid file:
//   KVOX 1 30 30 30 <min x> <min y> <min z> <edge>
//   27000 non-negative integers, x-major then y then z
// The crop box must be a cube. Errors are kFormatError with a byte offset.
std::string format_kvox(const pipeline::VoxelCountGrid& grid);
pipeline::VoxelCountGrid parse_kvox(std::string_view text);

void write_kvox(const pipeline::VoxelCountGrid& grid, const std::filesystem::path& path);
pipeline::VoxelCountGrid read_kvox(const std::filesystem::path& path);

}  // namespace kiip::io
