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

#include "kiip/pipeline.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "kiip/error.hpp"
#include "kiip/harness/robot.hpp"

namespace kiip::pipeline {
namespace {

using sensor::OrganizedPointCloud;

OrganizedPointCloud single_pixel_frame(double depth, bool valid = true) {
  OrganizedPointCloud c = OrganizedPointCloud::empty(1, 1, "camera");
  if (valid) {
    c.points[0] = {0.0, 0.0, depth};
    c.valid[0] = 1;
    c.source[0] = 0;
  }
  return c;
}

TEST(ScheduleTest, ThirteenRollsThenSevenPitches) {
  const WristSchedule s = default_schedule();
  ASSERT_EQ(s.poses.size(), 20u);
  for (int i = 0; i < 13; ++i) {
    EXPECT_NEAR(rad_to_deg(s.poses[i].roll), -180.0 + 30.0 * i, 1e-12);
    EXPECT_EQ(s.poses[i].pitch, 0.0);
    EXPECT_FALSE(s.poses[i].flip);
  }
  const double pitches[] = {20, 40, 60, 0, 20, 40, 60};
  for (int i = 0; i < 7; ++i) {
    EXPECT_EQ(s.poses[13 + i].roll, 0.0);
    EXPECT_NEAR(rad_to_deg(s.poses[13 + i].pitch), pitches[i], 1e-12);
    EXPECT_EQ(s.poses[13 + i].flip, i >= 3);
  }
}

TEST(TemporalMedianTest, LowerMedianOfValidFrames) {
  std::vector<OrganizedPointCloud> f;
  for (double d : {0.5, 0.9, 0.7, 0.6}) f.push_back(single_pixel_frame(d));
  EXPECT_DOUBLE_EQ(temporal_median(f).points[0].z(), 0.6);
}

TEST(TemporalMedianTest, QuorumOfHalfTheFrames) {
  std::vector<OrganizedPointCloud> f;
  for (int i = 0; i < 10; ++i) f.push_back(single_pixel_frame(0.5, i < 5));
  EXPECT_TRUE(temporal_median(f).is_valid(0));
  f[4] = single_pixel_frame(0, false);
  EXPECT_FALSE(temporal_median(f).is_valid(0));
}

TEST(TemporalMedianTest, FourCorruptedFramesRecoverExactly) {
  const double truth = 0.537;
  for (double bad : {0.0001, 5.0}) {
    std::vector<OrganizedPointCloud> f;
    for (int i = 0; i < 10; ++i) f.push_back(single_pixel_frame(i % 3 == 0 ? bad : truth));
    EXPECT_EQ(temporal_median(f).points[0].z(), truth);
  }
}

TEST(TemporalMedianTest, RejectsMismatchedFrames) {
  std::vector<OrganizedPointCloud> f = {single_pixel_frame(1),
                                        OrganizedPointCloud::empty(2, 1, "camera")};
  try {
    temporal_median(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  EXPECT_THROW(temporal_median({}), Error);
}

TEST(CropTest, RequiresGripperFrame) {
  try {
    spatial_crop(single_pixel_frame(0.05), CropBox{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWrongFrame);
  }
}

TEST(CropTest, HalfOpenBounds) {
  OrganizedPointCloud c = OrganizedPointCloud::empty(3, 1, "gripper");
  c.points = {{0.0, -0.05, -0.05}, {0.10, 0.0, 0.0}, {0.05, 0.0, 0.0499}};
  c.valid = {1, 1, 1};
  const auto kept = spatial_crop(c, CropBox{});
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0], c.points[0]);
  EXPECT_EQ(kept[1], c.points[2]);
}

TEST(AccumulateTest, CenterPointLandsInMiddleVoxel) {
  VoxelCountGrid g;
  const Vec3 p(0.05, 0.0, 0.0);
  accumulate(std::span<const Vec3>(&p, 1), g);
  EXPECT_EQ(g.at(15, 15, 15), 1u);
  EXPECT_EQ(g.total(), 1u);
}

TEST(AccumulateTest, CornersAndOutOfBounds) {
  VoxelCountGrid g;
  std::vector<Vec3> pts = {{0.0, -0.05, -0.05}, {0.0999999, 0.0499999, 0.0499999}};
  accumulate(pts, g);
  EXPECT_EQ(g.at(0, 0, 0), 1u);
  EXPECT_EQ(g.at(29, 29, 29), 1u);
  const Vec3 out(0.1, 0.0, 0.0);
  try {
    accumulate(std::span<const Vec3>(&out, 1), g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfBounds);
  }
}

TEST(ThresholdTest, StrictlyBelowMinCountIsEmpty) {
  VoxelCountGrid g;
  g.counts[linear_index(1, 2, 3)] = 3;
  g.counts[linear_index(4, 5, 6)] = 4;
  const OccupancyGrid o = threshold(g);
  EXPECT_FALSE(o.at(1, 2, 3));
  EXPECT_TRUE(o.at(4, 5, 6));
  EXPECT_EQ(o.occupied_count(), 1u);
  EXPECT_EQ(threshold(g, 3).occupied_count(), 2u);
}

TEST(IndexTest, LinearRoundTrip) {
  for (std::size_t i : {std::size_t{0}, std::size_t{12345}, kVoxelCount - 1})
    EXPECT_EQ(linear_index(voxel_index(i).x, voxel_index(i).y, voxel_index(i).z), i);
}

TEST(ViewGeometryTest, GimbalAimsAtCropCenter) {
  const RobotModel robot = harness::fixture_robot();
  for (const WristPose& p : default_schedule().poses) {
    const ViewGeometry g = view_geometry(robot, p, CameraMode::kTracking, CropBox{});
    const Vec3 target = g.gripper_pose(CropBox{}.center());
    const Vec3 in_cam = geom::invert(g.camera_pose)(target);
    EXPECT_LE(std::hypot(in_cam.x(), in_cam.y()), 1e-9);
    EXPECT_NEAR(in_cam.z(), harness::kCameraDistance, 1e-9);
  }
}

TEST(RunKiipTest, ThreadCountDoesNotChangeCounts) {
  SceneTemplate scene;
  scene.grasped_object = translated(make_box({0.04, 0.03, 0.05}), {0.05, 0, 0});
  sensor::NoiseModel noise;
  noise.gaussian_sigma = 0.002;
  noise.outlier_prob = 0.05;
  noise.outlier_range = 0.05;
  noise.rng_seed = 17;
  KiipConfig one;
  KiipConfig four;
  four.threads = 4;
  const RobotModel robot = harness::fixture_robot();
  const KiipResult a = run_kiip(scene, robot, {}, noise, default_schedule(), one);
  const KiipResult b = run_kiip(scene, robot, {}, noise, default_schedule(), four);
  EXPECT_EQ(a.counts.counts, b.counts.counts);
  EXPECT_GT(a.occupancy.occupied_count(), 100u);
  EXPECT_EQ(a.manifest.views.size(), 20u);
}

TEST(RunKiipTest, EmptyScheduleGivesEmptyGrid) {
  SceneTemplate scene;
  scene.grasped_object = make_icosphere(0.03, 2);
  const KiipResult r =
      run_kiip(scene, harness::fixture_robot(), {}, {}, WristSchedule{}, KiipConfig{});
  EXPECT_EQ(r.counts.total(), 0u);
  EXPECT_TRUE(r.manifest.views.empty());
}

}  // namespace
}  // namespace kiip::pipeline
