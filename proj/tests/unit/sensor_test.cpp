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

#include "kiip/sensor.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "kiip/error.hpp"
#include "oracles.hpp"

namespace kiip::sensor {
namespace {

// Sphere of radius 0.05 m held 0.5 m in front of an identity camera.
Scene sphere_scene() {
  Scene s;
  s.grasped_object = make_icosphere(0.05, 5);
  s.gripper_pose = geom::RigidTransform::from_translation({0, 0, 0.5});
  return s;
}

TEST(PinholeCameraTest, DefaultsAndValidation) {
  PinholeCamera cam;
  EXPECT_EQ(cam.width, 160);
  EXPECT_EQ(cam.height, 120);
  EXPECT_NO_THROW(cam.validate());
  cam.z_min = 4.0;
  EXPECT_THROW(cam.validate(), Error);
}

TEST(RenderDepthTest, MatchesAnalyticSphere) {
  const PinholeCamera cam;
  const Scene scene = sphere_scene();
  const OrganizedPointCloud cloud = render_depth(scene, cam);
  EXPECT_EQ(cloud.frame_name, kCameraFrame);
  // Facets lie inside the sphere by at most this much along their normal.
  const TriangleMesh& m = scene.grasped_object;
  double sag = 0;
  for (const auto& f : m.faces) {
    const Vec3 n = (m.vertices[f[1]] - m.vertices[f[0]]).cross(m.vertices[f[2]] - m.vertices[f[0]]).normalized();
    sag = std::max(sag, 0.05 - std::abs(n.dot(m.vertices[f[0]])));
  }
  int checked = 0;
  for (int v = 0; v < cam.height; ++v)
    for (int u = 0; u < cam.width; ++u) {
      const Vec3 d = cam.ray_direction(u, v);
      const auto t = testing::ray_sphere(Vec3::Zero(), d, {0, 0, 0.5}, 0.05);
      const std::size_t i = cloud.index(u, v);
      // Polygonal silhouette: skip the last half millimeter of the rim.
      const auto inner = testing::ray_sphere(Vec3::Zero(), d, {0, 0, 0.5}, 0.0495);
      if (inner) {
        ASSERT_TRUE(cloud.is_valid(i));
        // Stretched along the ray by the incidence angle.
        const Vec3 normal = (*t * d - Vec3(0, 0, 0.5)).normalized();
        EXPECT_NEAR(cloud.points[i].z(), *t, sag / -normal.dot(d.normalized()) + 1e-12);
        EXPECT_EQ(cloud.source[i], kGraspedObjectSource);
        ++checked;
      } else if (!t) {
        EXPECT_FALSE(cloud.is_valid(i));
      }
    }
  EXPECT_GT(checked, 400);  // disc of about 12 px radius
}

TEST(RenderDepthTest, RespectsDepthRange) {
  PinholeCamera cam;
  cam.z_max = 0.4;
  EXPECT_EQ(render_depth(sphere_scene(), cam).valid_count(), 0u);
}

TEST(RenderDepthTest, TagsBackgroundSources) {
  Scene s = sphere_scene();
  s.background.push_back({make_box({2, 2, 0.01}), geom::RigidTransform::from_translation({0, 0, 1})});
  const OrganizedPointCloud cloud = render_depth(s, PinholeCamera{});
  EXPECT_EQ(cloud.source[cloud.index(0, 0)], kFirstBackgroundSource);
  EXPECT_EQ(cloud.source[cloud.index(80, 60)], kGraspedObjectSource);
}

TEST(NoiseTest, ZeroNoiseIsIdentity) {
  const OrganizedPointCloud clean = render_depth(sphere_scene(), PinholeCamera{});
  const OrganizedPointCloud same = add_noise(clean, NoiseModel{});
  for (std::size_t i = 0; i < clean.size(); ++i) {
    ASSERT_EQ(same.valid[i], clean.valid[i]);
    if (clean.is_valid(i)) EXPECT_EQ(same.points[i], clean.points[i]);
  }
}

TEST(NoiseTest, GaussianStatistics) {
  // A plane one meter away fills the image; depth residuals should have the
  // configured spread and keep each pixel's bearing.
  Scene s;
  s.grasped_object = make_rectangle(4, 4);
  s.gripper_pose = geom::RigidTransform::from_translation({0, 0, 1});
  const OrganizedPointCloud clean = render_depth(s, PinholeCamera{});
  NoiseModel m;
  m.gaussian_sigma = 0.004;
  m.rng_seed = 99;
  const OrganizedPointCloud noisy = add_noise(clean, m);
  double sum = 0, sq = 0;
  const double n = static_cast<double>(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double r = noisy.points[i].z() - clean.points[i].z();
    sum += r;
    sq += r * r;
    const Vec3 a = noisy.points[i].normalized(), b = clean.points[i].normalized();
    EXPECT_LE((a - b).norm(), 1e-12);
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(mean, 0.0, 4 * 0.004 / std::sqrt(n));
  EXPECT_NEAR(sd, 0.004, 0.004 * 0.03);
}

TEST(NoiseTest, DropoutAndOutlierRates) {
  Scene s;
  s.grasped_object = make_rectangle(4, 4);
  s.gripper_pose = geom::RigidTransform::from_translation({0, 0, 1});
  const OrganizedPointCloud clean = render_depth(s, PinholeCamera{});
  NoiseModel m;
  m.dropout_prob = 0.1;
  m.outlier_prob = 0.2;
  m.outlier_range = 0.05;
  m.rng_seed = 4;
  const OrganizedPointCloud noisy = add_noise(clean, m);
  const double n = static_cast<double>(clean.size());
  const double kept = static_cast<double>(noisy.valid_count()) / n;
  EXPECT_NEAR(kept, 0.9, 0.01);
  std::size_t moved = 0;
  for (std::size_t i = 0; i < clean.size(); ++i)
    if (noisy.is_valid(i)) {
      const double r = std::abs(noisy.points[i].z() - clean.points[i].z());
      EXPECT_LE(r, 0.05);
      moved += r > 0;
    }
  EXPECT_NEAR(static_cast<double>(moved) / static_cast<double>(noisy.valid_count()), 0.2, 0.01);
}

TEST(NoiseTest, SeedControlsOutput) {
  const OrganizedPointCloud clean = render_depth(sphere_scene(), PinholeCamera{});
  NoiseModel m;
  m.gaussian_sigma = 0.003;
  m.rng_seed = 1;
  const auto a = add_noise(clean, m);
  const auto b = add_noise(clean, m);
  m.rng_seed = 2;
  const auto c = add_noise(clean, m);
  bool differs = false;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (!clean.is_valid(i)) continue;
    EXPECT_EQ(a.points[i], b.points[i]);
    differs |= a.points[i] != c.points[i];
  }
  EXPECT_TRUE(differs);
}

TEST(CaptureBurstTest, FramesDifferAndValidate) {
  NoiseModel m;
  m.gaussian_sigma = 0.003;
  const auto frames = capture_burst(sphere_scene(), PinholeCamera{}, m, 3);
  ASSERT_EQ(frames.size(), 3u);
  const std::size_t i = frames[0].index(80, 60);
  EXPECT_NE(frames[0].points[i], frames[1].points[i]);
  EXPECT_THROW(capture_burst(sphere_scene(), PinholeCamera{}, m, 0), Error);
  m.outlier_prob = 1.5;
  EXPECT_THROW(capture_burst(sphere_scene(), PinholeCamera{}, m, 1), Error);
}

}  // namespace
}  // namespace kiip::sensor
