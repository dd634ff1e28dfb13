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
#include "kiip/io/mesh_file.hpp"

#include "kiip/error.hpp"
#include "kiip/io/file.hpp"
#include "kiip/io/off.hpp"
#include "kiip/io/ply.hpp"

namespace kiip::io {

TriangleMesh read_mesh_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::size_t start = text.find_first_not_of(" \t\r\n");
  if (start != std::string::npos && text.compare(start, 3, "ply") == 0) return parse_ply_mesh(text);
  if (start != std::string::npos && text.compare(start, 3, "OFF") == 0) return parse_off(text);
  throw Error(ErrorCode::kFormatError,
              "'" + path.string() + "' is neither OFF nor PLY", SourcePosition{.byte_offset = 0});
}

}  // namespace kiip::io
