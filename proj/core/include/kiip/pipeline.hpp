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
#include <string>
#include <vector>

#include "kiip/chain_io.hpp"
#include "kiip/geometry.hpp"
#include "kiip/sensor.hpp"

namespace kiip::pipeline {

inline constexpr int kGridResolution = 30;
inline constexpr std::size_t kVoxelCount =
    static_cast<std::size_t>(kGridResolution) * kGridResolution * kGridResolution;
inline constexpr std::uint32_t kDefaultMinCount = 4;
inline constexpr int kDefaultFramesPerView = 10;

// Wrist angles in radians. flip adds a half turn to the roll joint.
struct WristPose {
  double roll = 0.0;
  double pitch = 0.0;
  bool flip = false;
};

struct WristSchedule {
  std::vector<WristPose> poses;
};

// 13 roll poses across +-180 deg, three pitch poses at roll 0 and four more
// after flipping the roll axis by a half turn.
WristSchedule default_schedule();

// Gripper-frame region kept by spatial_crop. Half-open: min <= p < max.
struct CropBox {
  Vec3 min_corner{0.0, -0.05, -0.05};
  Vec3 max_corner{0.10, 0.05, 0.05};

  void validate() const;
  Vec3 extent() const { return max_corner - min_corner; }
  Vec3 center() const { return 0.5 * (min_corner + max_corner); }
  bool contains(const Vec3& p) const {
    return (p.array() >= min_corner.array()).all() && (p.array() < max_corner.array()).all();
  }
  bool is_cube() const;
  // Cube of the given edge centered on center.
  static CropBox cube(const Vec3& center, double edge);
};

struct VoxelIndex {
  int x = 0;
  int y = 0;
  int z = 0;
  bool operator==(const VoxelIndex&) const = default;
};

// Linear layout is x-major: index = (x * 30 + y) * 30 + z.
constexpr std::size_t linear_index(int x, int y, int z) {
  return (static_cast<std::size_t>(x) * kGridResolution + static_cast<std::size_t>(y)) *
             kGridResolution +
         static_cast<std::size_t>(z);
}
constexpr VoxelIndex voxel_index(std::size_t linear) {
  const int r = kGridResolution;
  return {static_cast<int>(linear / (r * r)), static_cast<int>((linear / r) % r),
          static_cast<int>(linear % r)};
}

// Voxel geometry shared by count and occupancy grids.
Vec3 voxel_size(const CropBox& crop);
Vec3 voxel_center(const CropBox& crop, VoxelIndex idx);

struct VoxelCountGrid {
  CropBox crop;
  std::vector<std::uint32_t> counts = std::vector<std::uint32_t>(kVoxelCount, 0);

  std::uint32_t at(int x, int y, int z) const { return counts[linear_index(x, y, z)]; }
  std::uint64_t total() const;
  VoxelCountGrid& operator+=(const VoxelCountGrid& other);
};

struct OccupancyGrid {
  CropBox crop;
  std::vector<std::uint8_t> occupied = std::vector<std::uint8_t>(kVoxelCount, 0);
  std::uint32_t source_threshold = kDefaultMinCount;

  bool at(int x, int y, int z) const { return occupied[linear_index(x, y, z)] != 0; }
  std::size_t occupied_count() const;
};

// Pixelwise temporal median. A pixel stays valid when at least ceil(n/2)
// frames observed it; the kept point is the one with the lower-median depth.
// Throws kDimensionMismatch on inconsistent frames and kInvalidArgument on an
// empty list.
sensor::OrganizedPointCloud temporal_median(std::span<const sensor::OrganizedPointCloud> frames);

sensor::OrganizedPointCloud to_gripper_frame(const sensor::OrganizedPointCloud& cloud,
                                             const geom::RigidTransform& camera_to_gripper);

struct TaggedPoint {
  Vec3 position;
  std::int32_t source = sensor::kNoSource;
};

// Throws kWrongFrame unless the cloud is in the gripper frame.
std::vector<Vec3> spatial_crop(const sensor::OrganizedPointCloud& cloud, const CropBox& box);
std::vector<TaggedPoint> spatial_crop_tagged(const sensor::OrganizedPointCloud& cloud,
                                             const CropBox& box);

// Bins each point into floor((p - min) * 30 / edge). Throws kOutOfBounds for a
// point outside grid.crop.
void accumulate(std::span<const Vec3> points, VoxelCountGrid& grid);

OccupancyGrid threshold(const VoxelCountGrid& grid, std::uint32_t min_count = kDefaultMinCount);

// Robot description consumed by run_kiip. The arm tip is the gripper frame,
// the head tip is the camera optical frame.
struct RobotModel {
  geom::ChainDescription arm;
  geom::ChainDescription head;
  int wrist_pitch_joint = 0;
  int wrist_roll_joint = 0;
  int gimbal_pan_joint = 0;
  int gimbal_tilt_joint = 1;

  void validate() const;
};

// Pan/tilt values that point the optical axis at a base-frame target,
// starting from the given head state.
geom::JointState aim_gimbal(const RobotModel& robot, const geom::JointState& head_state,
                            const Vec3& target_base);

enum class CameraMode {
  kTracking,  // re-aim the gimbal at the crop center before every view
  kFixed,     // aim once at the home wrist pose and hold
};

struct SceneTemplate {
  TriangleMesh grasped_object;  // gripper frame
  std::vector<sensor::PosedMesh> background;
};

struct KiipConfig {
  CropBox crop;
  std::uint32_t min_count = kDefaultMinCount;
  int frames_per_view = kDefaultFramesPerView;
  CameraMode camera_mode = CameraMode::kTracking;
  // 0 picks the hardware concurrency.
  unsigned threads = 1;
};

struct ViewRecord {
  WristPose pose;
  std::uint64_t noise_seed = 0;
  double gimbal_pan = 0.0;
  double gimbal_tilt = 0.0;
  std::size_t valid_pixels = 0;      // after the temporal median
  std::size_t retained_points = 0;   // after the crop
  std::size_t background_points = 0; // retained points hitting background meshes
};

struct RunManifest {
  sensor::PinholeCamera camera;
  sensor::NoiseModel noise;
  KiipConfig config;
  std::vector<ViewRecord> views;

  std::size_t total_background_points() const;
};

std::string format_run_manifest(const RunManifest& manifest);

struct KiipResult {
  VoxelCountGrid counts;
  OccupancyGrid occupancy;
  RunManifest manifest;
};

struct ViewGeometry {
  geom::JointState arm_state;
  geom::JointState head_state;
  geom::RigidTransform gripper_pose;  // gripper -> base
  geom::RigidTransform camera_pose;   // camera -> base
};

// Joint values and frames for one schedule entry.
ViewGeometry view_geometry(const RobotModel& robot, const WristPose& pose, CameraMode mode,
                           const CropBox& crop);

KiipResult run_kiip(const SceneTemplate& scene, const RobotModel& robot,
                    const sensor::PinholeCamera& camera, const sensor::NoiseModel& noise,
                    const WristSchedule& schedule, const KiipConfig& config);

}  // namespace kiip::pipeline
