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
#include "kiip/bvh.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace kiip {

namespace {

constexpr std::uint32_t kLeafSize = 4;

bool ray_box(const Vec3& origin, const Vec3& inv_dir, const Aabb& box, double t_min,
             double t_max, double& t_enter) {
  for (int axis = 0; axis < 3; ++axis) {
    double t0 = (box.min[axis] - origin[axis]) * inv_dir[axis];
    double t1 = (box.max[axis] - origin[axis]) * inv_dir[axis];
    if (t0 > t1) std::swap(t0, t1);
    // NaN from 0 * inf (ray in the slab plane) leaves the bounds unchanged.
    if (t0 > t_min) t_min = t0;
    if (t1 < t_max) t_max = t1;
    if (t_min > t_max) return false;
  }
  t_enter = t_min;
  return true;
}

}  // namespace

std::optional<double> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b,
                                         const Vec3& c, double t_min, double t_max) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = ray.direction.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-300) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = ray.origin - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = ray.direction.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (t < t_min || t > t_max) return std::nullopt;
  return t;
}

Bvh::Bvh(std::span<const TriangleMesh> meshes) {
  for (std::size_t m = 0; m < meshes.size(); ++m) {
    const TriangleMesh& mesh = meshes[m];
    for (const Face& f : mesh.faces) {
      triangles_.push_back({mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]],
                            static_cast<std::int32_t>(m)});
    }
  }
  if (triangles_.empty()) return;
  nodes_.reserve(2 * triangles_.size() / kLeafSize + 1);
  build_node(0, static_cast<std::uint32_t>(triangles_.size()));
}

std::uint32_t Bvh::build_node(std::uint32_t begin, std::uint32_t end) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  Aabb centroids;
  for (std::uint32_t i = begin; i < end; ++i) {
    const Triangle& t = triangles_[i];
    box.extend(t.a);
    box.extend(t.b);
    box.extend(t.c);
    centroids.extend((t.a + t.b + t.c) / 3.0);
  }
  nodes_[index].box = box;
  const Vec3 extent = centroids.extent();
  int axis = 0;
  if (extent.y() > extent[axis]) axis = 1;
  if (extent.z() > extent[axis]) axis = 2;
  if (end - begin <= kLeafSize || !(extent[axis] > 0.0)) {
    nodes_[index].first = begin;
    nodes_[index].count = end - begin;
    return index;
  }
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(triangles_.begin() + begin, triangles_.begin() + mid, triangles_.begin() + end,
                   [axis](const Triangle& l, const Triangle& r) {
                     return (l.a[axis] + l.b[axis] + l.c[axis]) < (r.a[axis] + r.b[axis] + r.c[axis]);
                   });
  build_node(begin, mid);  // left child is always index + 1
  const std::uint32_t right = build_node(mid, end);
  nodes_[index].first = right;
  nodes_[index].count = 0;
  return index;
}

std::optional<RayHit> Bvh::closest_hit(const Ray& ray, double t_min, double t_max) const {
  if (nodes_.empty()) return std::nullopt;
  const Vec3 inv_dir = ray.direction.cwiseInverse();
  std::optional<RayHit> best;
  double best_t = t_max;
  std::array<std::uint32_t, 64> stack;
  std::size_t top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    double t_enter;
    if (!ray_box(ray.origin, inv_dir, node.box, t_min, best_t, t_enter)) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const Triangle& tri = triangles_[i];
        const auto t = intersect_triangle(ray, tri.a, tri.b, tri.c, t_min, best_t);
        if (!t) continue;
        if (!best || *t < best_t || (*t == best_t && i < best->triangle)) {
          best_t = *t;
          best = RayHit{*t, i, tri.source};
        }
      }
      continue;
    }
    const std::uint32_t left = static_cast<std::uint32_t>(&node - nodes_.data()) + 1;
    const std::uint32_t right = node.first;
    double tl, tr;
    const bool hl = ray_box(ray.origin, inv_dir, nodes_[left].box, t_min, best_t, tl);
    const bool hr = ray_box(ray.origin, inv_dir, nodes_[right].box, t_min, best_t, tr);
    if (hl && hr) {
      // Push the farther child first so the nearer one is visited next.
      if (tl <= tr) {
        stack[top++] = right;
        stack[top++] = left;
      } else {
        stack[top++] = left;
        stack[top++] = right;
      }
    } else if (hl) {
      stack[top++] = left;
    } else if (hr) {
      stack[top++] = right;
    }
  }
  return best;
}

}  // namespace kiip
