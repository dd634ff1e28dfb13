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

#include "kiip/geometry.hpp"

namespace kiip::geom {

// A chain plus the joint values it should rest at when a caller does not
// command a joint explicitly.
struct ChainDescription {
  KinematicChain chain;
  JointState home;
};

// JSON chain description; see docs/formats.md. Angles in the file are in
// degrees, lengths in meters. Errors are kFormatError.
ChainDescription parse_chain_json(std::string_view text);
std::string format_chain_json(const ChainDescription& desc);

ChainDescription load_chain_file(const std::filesystem::path& path);
void save_chain_file(const ChainDescription& desc, const std::filesystem::path& path);

}  // namespace kiip::geom
