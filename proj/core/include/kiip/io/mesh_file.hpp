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

#include "kiip/mesh.hpp"

namespace kiip::io {

// OFF or ASCII PLY, chosen by the file's leading magic word. Throws kIoError
// when the file cannot be read, kFormatError for any other content.
TriangleMesh read_mesh_file(const std::filesystem::path& path);

}  // namespace kiip::io
