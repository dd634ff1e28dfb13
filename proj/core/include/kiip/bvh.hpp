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
#include <optional>
#include <span>
#include <vector>

#include "kiip/mesh.hpp"

namespace kiip {

struct Ray {
  Vec3 origin;
  Vec3 direction;  // need not be unit length; hit distances are in units of it
};

struct RayHit {
  double t = 0.0;
  std::uint32_t triangle = 0;
  // Index of the mesh the triangle came from, in the order given to build().
  std::int32_t source = -1;
};

// Moller-Trumbore. Returns the ray parameter of the hit if it lies in
// [t_min, t_max].
std::optional<double> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b,
                                         const Vec3& c, double t_min, double t_max);

// Binary bounding-volume hierarchy over the triangles of several meshes.
// Immutable after construction; queries are thread-safe.
class Bvh {
 public:
  Bvh() = default;
  explicit Bvh(std::span<const TriangleMesh> meshes);

  // Nearest hit with t in [t_min, t_max]. Ties resolve to the lower
  // triangle index so results do not depend on traversal order.
  std::optional<RayHit> closest_hit(const Ray& ray, double t_min, double t_max) const;

  std::size_t triangle_count() const { return triangles_.size(); }
  bool empty() const { return triangles_.empty(); }

 private:
  struct Triangle {
    Vec3 a, b, c;
    std::int32_t source;
  };
  struct Node {
    Aabb box;
    std::uint32_t first = 0;  // first triangle (leaf) or right child (inner)
    std::uint32_t count = 0;  // triangles in a leaf, 0 for inner nodes
  };

  std::uint32_t build_node(std::uint32_t begin, std::uint32_t end);

  std::vector<Triangle> triangles_;
  std::vector<Node> nodes_;
};

}  // namespace kiip
