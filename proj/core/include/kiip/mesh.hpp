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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "kiip/geometry.hpp"
#include "kiip/types.hpp"

namespace kiip {

using Face = std::array<std::uint32_t, 3>;

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    min = min.cwiseMin(b.min);
    max = max.cwiseMax(b.max);
  }
  bool empty() const { return (min.array() > max.array()).any(); }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
};

// Vertices in meters; faces wind counter-clockwise seen from outside.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  bool empty() const { return faces.empty(); }
  Aabb bounds() const;

  // Throws kIndexOutOfRange on a face that references a missing vertex.
  void validate() const;

  // Drops faces with repeated indices or area below min_area (m^2).
  // Returns the number of faces removed.
  std::size_t remove_degenerate_faces(double min_area = 1e-18);
};

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

TriangleMesh transformed(const TriangleMesh& mesh, const geom::RigidTransform& t);
TriangleMesh scaled(const TriangleMesh& mesh, double factor);
TriangleMesh translated(const TriangleMesh& mesh, const Vec3& offset);
TriangleMesh merge(std::span<const TriangleMesh> meshes);

// Axis-aligned box centered at the origin.
TriangleMesh make_box(const Vec3& size);
// Geodesic sphere from a subdivided icosahedron; 20 * 4^subdivisions faces.
TriangleMesh make_icosphere(double radius, int subdivisions);
// Closed frustum along +z from z = -height/2 to +height/2. A zero radius
// collapses that end to an apex.
TriangleMesh make_frustum(double radius_bottom, double radius_top, double height, int segments);
inline TriangleMesh make_cylinder(double radius, double height, int segments) {
  return make_frustum(radius, radius, height, segments);
}
// Open-topped vessel with a solid floor: outer wall, rim, inner wall, inner
// floor and outer bottom form one closed surface.
TriangleMesh make_cup(double radius_bottom, double radius_top, double height, double wall,
                      int segments);
// Torus in the xy plane around the z axis.
TriangleMesh make_torus(double major_radius, double minor_radius, int major_segments,
                        int minor_segments);
// Single rectangle in the z = 0 plane facing +z.
TriangleMesh make_rectangle(double width, double height);

}  // namespace kiip
