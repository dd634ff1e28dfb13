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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "kiip/pipeline.hpp"

namespace kiip::io {

struct DatasetEntry {
  std::filesystem::path grid_path;  // relative paths resolve against the manifest
  int label = 0;
  std::string object_id;
  int grip_index = 0;
};

// Labelled KVOX grids. Grids are binarized with "threshold" when loaded for
// training (4 for robot scans; 1 for direct mesh voxelizations).
struct DatasetManifest {
  std::vector<std::string> labels;
  std::uint32_t threshold = pipeline::kDefaultMinCount;
  std::vector<DatasetEntry> entries;

  // Throws kFormatError when a label is outside 0..labels.size()-1.
  void validate() const;
};

DatasetManifest parse_dataset_manifest(std::string_view text);
std::string format_dataset_manifest(const DatasetManifest& manifest);

// Resolves relative grid paths against the manifest's directory and checks
// that each grid exists (kIoError naming the missing path).
DatasetManifest load_dataset_manifest(const std::filesystem::path& path);
void save_dataset_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace kiip::io
