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
#include "kiip/io/voxelize.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace kiip::io {

using pipeline::CropBox;
using pipeline::kGridResolution;
using pipeline::linear_index;

std::size_t MeshVoxelization::occupied_count() const {
  return static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), 1));
}

pipeline::VoxelCountGrid MeshVoxelization::to_counts(std::uint32_t count) const {
  pipeline::VoxelCountGrid g;
  g.crop = crop;
  for (std::size_t i = 0; i < occupied.size(); ++i) g.counts[i] = occupied[i] ? count : 0;
  return g;
}

pipeline::OccupancyGrid MeshVoxelization::to_occupancy() const {
  pipeline::OccupancyGrid g;
  g.crop = crop;
  g.occupied = occupied;
  g.source_threshold = 1;
  return g;
}

namespace {

bool axis_separates(const Vec3& axis, const Vec3& v0, const Vec3& v1, const Vec3& v2,
                    const Vec3& half) {
  const double p0 = axis.dot(v0);
  const double p1 = axis.dot(v1);
  const double p2 = axis.dot(v2);
  const double r = half.x() * std::abs(axis.x()) + half.y() * std::abs(axis.y()) +
                   half.z() * std::abs(axis.z());
  return std::min({p0, p1, p2}) > r || std::max({p0, p1, p2}) < -r;
}

}  // namespace

bool triangle_box_overlap(const Vec3& box_center, const Vec3& half, const Vec3& a, const Vec3& b,
                          const Vec3& c) {
  const Vec3 v0 = a - box_center;
  const Vec3 v1 = b - box_center;
  const Vec3 v2 = c - box_center;
  // Box face normals.
  for (int i = 0; i < 3; ++i) {
    const double lo = std::min({v0[i], v1[i], v2[i]});
    const double hi = std::max({v0[i], v1[i], v2[i]});
    if (lo > half[i] || hi < -half[i]) return false;
  }
  // Triangle normal.
  const std::array<Vec3, 3> edges{v1 - v0, v2 - v1, v0 - v2};
  const Vec3 n = edges[0].cross(edges[1]);
  if (axis_separates(n, v0, v1, v2, half)) return false;
  // Edge cross products.
  for (const Vec3& e : edges) {
    for (int i = 0; i < 3; ++i) {
      const Vec3 axis = Vec3::Unit(i).cross(e);
      if (axis.squaredNorm() == 0.0) continue;
      if (axis_separates(axis, v0, v1, v2, half)) return false;
    }
  }
  return true;
}

MeshVoxelization voxelize_mesh(const TriangleMesh& mesh, const CropBox& box, VoxelMode mode) {
  MeshVoxelization out;
  out.crop = box;
  out.mode = mode;
  const Vec3 size = pipeline::voxel_size(box);
  // Cells are shifted down by a hair so that a face lying exactly on a lower
  // boundary (up to rounding) lands in the upper cell only: the half-open
  // convention with a rounding margin.
  const Vec3 shrink = size * 1e-9;
  const Vec3 half = 0.5 * size - shrink;

  auto cell_range = [&](double lo, double hi, int axis) {
    const double s = size[axis];
    const int first = std::max(0, static_cast<int>(std::floor((lo - box.min_corner[axis]) / s)) - 1);
    const int last = std::min(kGridResolution - 1,
                              static_cast<int>(std::floor((hi - box.min_corner[axis]) / s)) + 1);
    return std::pair{first, last};
  };

  for (const Face& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    const Vec3 lo = a.cwiseMin(b).cwiseMin(c);
    const Vec3 hi = a.cwiseMax(b).cwiseMax(c);
    if ((hi.array() < box.min_corner.array()).any() || (lo.array() > box.max_corner.array()).any()) {
      continue;
    }
    const auto [x0, x1] = cell_range(lo.x(), hi.x(), 0);
    const auto [y0, y1] = cell_range(lo.y(), hi.y(), 1);
    const auto [z0, z1] = cell_range(lo.z(), hi.z(), 2);
    for (int x = x0; x <= x1; ++x) {
      for (int y = y0; y <= y1; ++y) {
        for (int z = z0; z <= z1; ++z) {
          const std::size_t idx = linear_index(x, y, z);
          if (out.occupied[idx]) continue;
          const Vec3 center = box.min_corner +
                              Vec3(x * size.x(), y * size.y(), z * size.z()) + half - shrink;
          if (triangle_box_overlap(center, half, a, b, c)) out.occupied[idx] = 1;
        }
      }
    }
  }

  if (mode == VoxelMode::kSolid) {
    // A tiny irrational offset keeps column rays off shared edges and vertices.
    const double jitter_x = 1.6180339887e-7 * size.x();
    const double jitter_y = 2.7182818284e-7 * size.y();
    std::vector<std::vector<double>> crossings(static_cast<std::size_t>(kGridResolution) *
                                               kGridResolution);
    for (const Face& f : mesh.faces) {
      const Vec3& a = mesh.vertices[f[0]];
      const Vec3& b = mesh.vertices[f[1]];
      const Vec3& c = mesh.vertices[f[2]];
      const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
      if (det == 0.0) continue;  // parallel to the rays
      const double lox = std::min({a.x(), b.x(), c.x()});
      const double hix = std::max({a.x(), b.x(), c.x()});
      const double loy = std::min({a.y(), b.y(), c.y()});
      const double hiy = std::max({a.y(), b.y(), c.y()});
      const int xa = std::max(0, static_cast<int>(std::floor((lox - box.min_corner.x()) / size.x() - 0.5)));
      const int xb = std::min(kGridResolution - 1,
                              static_cast<int>(std::ceil((hix - box.min_corner.x()) / size.x() - 0.5)));
      const int ya = std::max(0, static_cast<int>(std::floor((loy - box.min_corner.y()) / size.y() - 0.5)));
      const int yb = std::min(kGridResolution - 1,
                              static_cast<int>(std::ceil((hiy - box.min_corner.y()) / size.y() - 0.5)));
      for (int x = xa; x <= xb; ++x) {
        const double px = box.min_corner.x() + (x + 0.5) * size.x() + jitter_x;
        for (int y = ya; y <= yb; ++y) {
          const double py = box.min_corner.y() + (y + 0.5) * size.y() + jitter_y;
          // Barycentric coordinates of the column in the triangle's xy shadow.
          const double u = ((px - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (py - a.y())) / det;
          const double v = ((b.x() - a.x()) * (py - a.y()) - (px - a.x()) * (b.y() - a.y())) / det;
          if (u < 0.0 || v < 0.0 || u + v > 1.0) continue;
          const double z = a.z() + u * (b.z() - a.z()) + v * (c.z() - a.z());
          crossings[static_cast<std::size_t>(x) * kGridResolution + y].push_back(z);
        }
      }
    }
    for (int x = 0; x < kGridResolution; ++x) {
      for (int y = 0; y < kGridResolution; ++y) {
        auto& zs = crossings[static_cast<std::size_t>(x) * kGridResolution + y];
        if (zs.empty()) continue;
        std::sort(zs.begin(), zs.end());
        std::size_t below = 0;
        for (int z = 0; z < kGridResolution; ++z) {
          const double cz = box.min_corner.z() + (z + 0.5) * size.z();
          while (below < zs.size() && zs[below] < cz) ++below;
          if (below % 2 == 1) out.occupied[linear_index(x, y, z)] = 1;
        }
      }
    }
  }
  return out;
}

TriangleMesh normalize_to_box(const TriangleMesh& mesh, const CropBox& box,
                              double margin_fraction) {
  if (mesh.vertices.empty()) return mesh;
  const Aabb b = mesh.bounds();
  const double longest = b.extent().maxCoeff();
  const double target = box.extent().minCoeff() * (1.0 - 2.0 * margin_fraction);
  const double s = longest > 0.0 ? target / longest : 1.0;
  TriangleMesh out = mesh;
  const Vec3 c = b.center();
  for (Vec3& v : out.vertices) v = (v - c) * s + box.center();
  return out;
}

}  // namespace kiip::io
