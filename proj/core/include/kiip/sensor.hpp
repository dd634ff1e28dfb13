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
#include <string>
#include <string_view>
#include <vector>

#include "kiip/geometry.hpp"
#include "kiip/mesh.hpp"

namespace kiip::sensor {

inline constexpr std::string_view kCameraFrame = "camera";
inline constexpr std::string_view kGripperFrame = "gripper";

// Provenance tags carried per pixel by rendered clouds.
inline constexpr std::int32_t kNoSource = -1;
inline constexpr std::int32_t kGraspedObjectSource = 0;
// Background mesh i renders with source kFirstBackgroundSource + i.
inline constexpr std::int32_t kFirstBackgroundSource = 1;

// Optical frame convention: +z along the viewing axis, +x right, +y down.
struct PinholeCamera {
  int width = 160;
  int height = 120;
  double fx = 120.0;
  double fy = 120.0;
  double cx = 79.5;
  double cy = 59.5;
  double z_min = 0.3;
  double z_max = 3.0;

  // Throws kInvalidArgument when an invariant is violated.
  void validate() const;

  // Ray through pixel (u, v) with unit z component, so the hit parameter is
  // the depth.
  Vec3 ray_direction(int u, int v) const {
    return {(u - cx) / fx, (v - cy) / fy, 1.0};
  }
};

struct OrganizedPointCloud {
  int width = 0;
  int height = 0;
  std::vector<Vec3> points;          // row-major, index = v * width + u
  std::vector<std::uint8_t> valid;   // 1 where points[i] is a measurement
  std::vector<std::int32_t> source;  // provenance tag per pixel
  std::string frame_name;

  // All pixels invalid; invalid points hold NaN.
  static OrganizedPointCloud empty(int width, int height, std::string frame_name);

  std::size_t size() const { return points.size(); }
  std::size_t index(int u, int v) const { return static_cast<std::size_t>(v) * width + u; }
  bool is_valid(std::size_t i) const { return valid[i] != 0; }
  std::size_t valid_count() const;
  void invalidate(std::size_t i);
};

struct PosedMesh {
  TriangleMesh mesh;
  geom::RigidTransform pose;  // mesh frame -> base frame
};

struct Scene {
  TriangleMesh grasped_object;      // in the gripper frame
  std::vector<PosedMesh> background;
  geom::RigidTransform gripper_pose;  // gripper -> base
  geom::RigidTransform camera_pose;   // camera optical frame -> base
};

struct NoiseModel {
  double gaussian_sigma = 0.0;  // meters, along the viewing ray
  double dropout_prob = 0.0;
  double outlier_prob = 0.0;
  double outlier_range = 0.0;   // meters; outliers move uniformly in +-range
  std::uint64_t rng_seed = 0;

  void validate() const;
  bool is_noise_free() const {
    return gaussian_sigma == 0.0 && dropout_prob == 0.0 && outlier_prob == 0.0;
  }
};

// Per-pixel nearest hit with depth in [z_min, z_max], in the camera frame.
OrganizedPointCloud render_depth(const Scene& scene, const PinholeCamera& camera);

// Seeded per pixel from (rng_seed, pixel index), so the result does not
// depend on the order pixels are processed in.
OrganizedPointCloud add_noise(const OrganizedPointCloud& cloud, const NoiseModel& model);

// One render, n independent noise applications. Frame i uses the sub-seed
// derive_seed(model.rng_seed, i).
std::vector<OrganizedPointCloud> capture_burst(const Scene& scene, const PinholeCamera& camera,
                                               const NoiseModel& model, int n);

}  // namespace kiip::sensor
