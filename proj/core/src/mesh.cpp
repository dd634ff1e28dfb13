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
#include "kiip/mesh.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "kiip/error.hpp"

namespace kiip {

Aabb TriangleMesh::bounds() const {
  Aabb b;
  for (const Vec3& v : vertices) b.extend(v);
  return b;
}

void TriangleMesh::validate() const {
  const std::size_t n = vertices.size();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (std::uint32_t idx : faces[f]) {
      if (idx >= n) {
        throw Error(ErrorCode::kIndexOutOfRange, "face " + std::to_string(f) +
                                                     " references vertex " + std::to_string(idx) +
                                                     " of " + std::to_string(n));
      }
    }
  }
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

std::size_t TriangleMesh::remove_degenerate_faces(double min_area) {
  const std::size_t before = faces.size();
  std::erase_if(faces, [&](const Face& f) {
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) return true;
    return !(triangle_area(vertices[f[0]], vertices[f[1]], vertices[f[2]]) > min_area);
  });
  return before - faces.size();
}

TriangleMesh transformed(const TriangleMesh& mesh, const geom::RigidTransform& t) {
  TriangleMesh out{geom::apply(t, mesh.vertices), mesh.faces};
  return out;
}

TriangleMesh scaled(const TriangleMesh& mesh, double factor) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v *= factor;
  return out;
}

TriangleMesh translated(const TriangleMesh& mesh, const Vec3& offset) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v += offset;
  return out;
}

TriangleMesh merge(std::span<const TriangleMesh> meshes) {
  TriangleMesh out;
  for (const TriangleMesh& m : meshes) {
    const auto base = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), m.vertices.begin(), m.vertices.end());
    for (const Face& f : m.faces) out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
  }
  return out;
}

TriangleMesh make_box(const Vec3& size) {
  const Vec3 h = 0.5 * size;
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                            (i & 4) ? h.z() : -h.z());
  }
  // Two triangles per face, outward winding.
  m.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6},   // -z, +z
             {0, 1, 4}, {1, 5, 4}, {2, 6, 3}, {3, 6, 7},   // -y, +y
             {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};  // -x, +x
  return m;
}

TriangleMesh make_icosphere(double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& v : m.vertices) v.normalize();
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto [it, inserted] = midpoints.try_emplace(key, 0u);
      if (inserted) {
        it->second = static_cast<std::uint32_t>(m.vertices.size());
        m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      }
      return it->second;
    };
    std::vector<Face> next;
    next.reserve(m.faces.size() * 4);
    for (const Face& f : m.faces) {
      const std::uint32_t ab = midpoint(f[0], f[1]);
      const std::uint32_t bc = midpoint(f[1], f[2]);
      const std::uint32_t ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.faces = std::move(next);
  }
  for (Vec3& v : m.vertices) v *= radius;
  return m;
}

namespace {

// Appends a ring of vertices at height z and returns the first index.
std::uint32_t add_ring(TriangleMesh& m, double radius, double z, int segments) {
  const auto first = static_cast<std::uint32_t>(m.vertices.size());
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * kPi * i / segments;
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), z);
  }
  return first;
}

// Quad strip between two rings; outward for a < b in z when flip is false.
void stitch(TriangleMesh& m, std::uint32_t lower, std::uint32_t upper, int segments, bool flip) {
  for (int i = 0; i < segments; ++i) {
    const std::uint32_t i0 = static_cast<std::uint32_t>(i);
    const std::uint32_t i1 = static_cast<std::uint32_t>((i + 1) % segments);
    Face f1{lower + i0, lower + i1, upper + i1};
    Face f2{lower + i0, upper + i1, upper + i0};
    if (flip) {
      std::swap(f1[1], f1[2]);
      std::swap(f2[1], f2[2]);
    }
    m.faces.push_back(f1);
    m.faces.push_back(f2);
  }
}

// Disk fan; faces up (+z) unless facing_down.
void cap(TriangleMesh& m, std::uint32_t ring, int segments, double z, bool facing_down) {
  const auto c = static_cast<std::uint32_t>(m.vertices.size());
  m.vertices.emplace_back(0.0, 0.0, z);
  for (int i = 0; i < segments; ++i) {
    const std::uint32_t a = ring + static_cast<std::uint32_t>(i);
    const std::uint32_t b = ring + static_cast<std::uint32_t>((i + 1) % segments);
    if (facing_down) {
      m.faces.push_back({c, b, a});
    } else {
      m.faces.push_back({c, a, b});
    }
  }
}

}  // namespace

TriangleMesh make_frustum(double radius_bottom, double radius_top, double height, int segments) {
  TriangleMesh m;
  const double z0 = -0.5 * height;
  const double z1 = 0.5 * height;
  const std::uint32_t lower = add_ring(m, radius_bottom, z0, segments);
  const std::uint32_t upper = add_ring(m, radius_top, z1, segments);
  stitch(m, lower, upper, segments, false);
  cap(m, lower, segments, z0, true);
  cap(m, upper, segments, z1, false);
  m.remove_degenerate_faces();
  return m;
}

TriangleMesh make_cup(double radius_bottom, double radius_top, double height, double wall,
                      int segments) {
  TriangleMesh m;
  const double z0 = -0.5 * height;
  const double z1 = 0.5 * height;
  const double floor_z = z0 + wall;
  const double inner_bottom =
      radius_bottom + (radius_top - radius_bottom) * (wall / height) - wall;
  const std::uint32_t outer_lo = add_ring(m, radius_bottom, z0, segments);
  const std::uint32_t outer_hi = add_ring(m, radius_top, z1, segments);
  const std::uint32_t inner_hi = add_ring(m, radius_top - wall, z1, segments);
  const std::uint32_t inner_lo = add_ring(m, inner_bottom, floor_z, segments);
  stitch(m, outer_lo, outer_hi, segments, false);
  stitch(m, inner_hi, outer_hi, segments, true);   // rim annulus, facing +z
  stitch(m, inner_lo, inner_hi, segments, true);   // inner wall, facing the axis
  cap(m, outer_lo, segments, z0, true);
  cap(m, inner_lo, segments, floor_z, false);
  m.remove_degenerate_faces();
  return m;
}

TriangleMesh make_torus(double major_radius, double minor_radius, int major_segments,
                        int minor_segments) {
  TriangleMesh m;
  for (int i = 0; i < major_segments; ++i) {
    const double u = 2.0 * kPi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double v = 2.0 * kPi * j / minor_segments;
      const double r = major_radius + minor_radius * std::cos(v);
      m.vertices.emplace_back(r * std::cos(u), r * std::sin(u), minor_radius * std::sin(v));
    }
  }
  auto idx = [&](int i, int j) {
    return static_cast<std::uint32_t>((i % major_segments) * minor_segments + (j % minor_segments));
  };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      m.faces.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
      m.faces.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
    }
  }
  return m;
}

TriangleMesh make_rectangle(double width, double height) {
  TriangleMesh m;
  const double hw = 0.5 * width;
  const double hh = 0.5 * height;
  m.vertices = {{-hw, -hh, 0}, {hw, -hh, 0}, {hw, hh, 0}, {-hw, hh, 0}};
  m.faces = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

}  // namespace kiip
