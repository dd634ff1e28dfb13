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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kiip/mesh.hpp"
#include "kiip/sensor.hpp"

namespace kiip::io {

// Contents of an ASCII PLY file restricted to what this project uses:
// vertex positions, any extra scalar vertex properties, and polygon faces.
struct PlyDocument {
  std::vector<std::string> comments;
  std::vector<Vec3> vertices;
  std::vector<std::string> extra_names;             // extra scalar vertex properties
  std::vector<std::vector<double>> extra_values;    // [property][vertex]
  std::vector<std::vector<std::uint32_t>> faces;

  // Values of a named extra vertex property, or nullptr.
  const std::vector<double>* extra(std::string_view name) const;
};

// Errors are kFormatError carrying the byte offset of the offending token.
PlyDocument parse_ply(std::string_view text);
std::string format_ply(const PlyDocument& doc);

// Meshes: vertex element then face element.
std::string format_ply_mesh(const TriangleMesh& mesh);
TriangleMesh parse_ply_mesh(std::string_view text);

// Organized clouds store only valid pixels, in pixel order, each with its
// pixel index and provenance tag; comments record frame_name and size so the
// lattice can be rebuilt.
std::string format_ply_cloud(const sensor::OrganizedPointCloud& cloud);
sensor::OrganizedPointCloud parse_ply_cloud(std::string_view text);

std::string format_ply_points(std::span<const Vec3> points,
                              std::span<const std::string> comments = {});

PlyDocument read_ply_file(const std::filesystem::path& path);

}  // namespace kiip::io
