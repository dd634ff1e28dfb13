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

#include "kiip/mesh.hpp"

namespace kiip::io {

// Object File Format as used by ModelNet. Accepts the counts on the header
// line or the next line (including the "OFF123 456 0" run-together form),
// '#' comments, extra per-vertex/per-face values, and polygon faces, which
// are fan-triangulated. Degenerate faces are dropped after loading.
//
// Errors (each naming the line): kBadHeader, kCountMismatch when the file
// ends early, kIndexOutOfRange, kFormatError for unparsable values.
TriangleMesh parse_off(std::string_view text);
TriangleMesh read_off_file(const std::filesystem::path& path);

std::string format_off(const TriangleMesh& mesh);

}  // namespace kiip::io
