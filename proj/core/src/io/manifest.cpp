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
#include "kiip/io/manifest.hpp"

#include <json.hpp>

#include "kiip/error.hpp"
#include "kiip/io/file.hpp"

namespace kiip::io {

using nlohmann::json;

void DatasetManifest::validate() const {
  if (labels.empty()) throw Error(ErrorCode::kFormatError, "manifest has no labels");
  for (const DatasetEntry& e : entries) {
    if (e.label < 0 || static_cast<std::size_t>(e.label) >= labels.size()) {
      throw Error(ErrorCode::kFormatError,
                  "entry '" + e.grid_path.string() + "' has label " + std::to_string(e.label) +
                      " outside 0.." + std::to_string(labels.size() - 1));
    }
  }
}

DatasetManifest parse_dataset_manifest(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kFormatError, e.what(), {.byte_offset = e.byte});
  }
  DatasetManifest m;
  try {
    m.labels = doc.at("labels").get<std::vector<std::string>>();
    m.threshold = doc.value("threshold", pipeline::kDefaultMinCount);
    for (const json& e : doc.at("entries")) {
      DatasetEntry entry;
      entry.grid_path = e.at("grid").get<std::string>();
      entry.label = e.at("label").get<int>();
      entry.object_id = e.value("object_id", std::string{});
      entry.grip_index = e.value("grip_index", 0);
      m.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("dataset manifest: ") + e.what());
  }
  m.validate();
  return m;
}

std::string format_dataset_manifest(const DatasetManifest& m) {
  json doc;
  doc["labels"] = m.labels;
  doc["threshold"] = m.threshold;
  json entries = json::array();
  for (const DatasetEntry& e : m.entries) {
    entries.push_back({{"grid", e.grid_path.generic_string()},
                       {"label", e.label},
                       {"object_id", e.object_id},
                       {"grip_index", e.grip_index}});
  }
  doc["entries"] = std::move(entries);
  return doc.dump(2) + "\n";
}

DatasetManifest load_dataset_manifest(const std::filesystem::path& path) {
  DatasetManifest m = parse_dataset_manifest(read_text_file(path));
  const std::filesystem::path base = path.parent_path();
  for (DatasetEntry& e : m.entries) {
    if (e.grid_path.is_relative()) e.grid_path = base / e.grid_path;
    if (!std::filesystem::exists(e.grid_path)) {
      throw Error(ErrorCode::kIoError, "grid '" + e.grid_path.string() + "' does not exist");
    }
  }
  return m;
}

void save_dataset_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  write_file_atomic(path, format_dataset_manifest(m));
}

}  // namespace kiip::io
