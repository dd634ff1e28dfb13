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
#include <vector>

#include "kiip/mesh.hpp"
#include "kiip/pipeline.hpp"

namespace kiip::io {

enum class VoxelMode { kSurface, kSolid };

struct MeshVoxelization {
  pipeline::CropBox crop;
  std::vector<std::uint8_t> occupied =
      std::vector<std::uint8_t>(pipeline::kVoxelCount, 0);
  VoxelMode mode = VoxelMode::kSurface;

  std::size_t occupied_count() const;
  // Each occupied voxel receives the given count.
  pipeline::VoxelCountGrid to_counts(std::uint32_t count = 1) const;
  pipeline::OccupancyGrid to_occupancy() const;
};

// Exact triangle / axis-aligned box overlap (separating axis test). Boxes are
// closed.
bool triangle_box_overlap(const Vec3& box_center, const Vec3& box_half, const Vec3& a,
                          const Vec3& b, const Vec3& c);

// Surface mode marks every voxel whose cell meets a triangle. Cells follow the
// same half-open convention as accumulate(): a triangle lying exactly on a
// cell's upper face belongs to the next cell. Solid mode adds the interior
// found by parity ray casting along +z through each voxel column.
MeshVoxelization voxelize_mesh(const TriangleMesh& mesh, const pipeline::CropBox& box,
                               VoxelMode mode);

// Uniformly scales and translates so the longest bounding-box side spans the
// box edge minus margin on each side, centered in the box.
TriangleMesh normalize_to_box(const TriangleMesh& mesh, const pipeline::CropBox& box,
                              double margin_fraction = 0.1);

}  // namespace kiip::io
