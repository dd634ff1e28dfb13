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

#include <cmath>
#include <limits>

#include "kiip/bvh.hpp"
#include "kiip/error.hpp"
#include "kiip/rng.hpp"

namespace kiip::sensor {

void PinholeCamera::validate() const {
  if (width < 1 || height < 1) throw Error(ErrorCode::kInvalidArgument, "camera size must be >= 1");
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  }
  if (!(z_min > 0.0) || !(z_min < z_max)) {
    throw Error(ErrorCode::kInvalidArgument, "depth range must satisfy 0 < z_min < z_max");
  }
}

void NoiseModel::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(dropout_prob) || !prob(outlier_prob)) {
    throw Error(ErrorCode::kInvalidArgument, "noise probabilities must lie in [0, 1]");
  }
  if (!(gaussian_sigma >= 0.0) || !(outlier_range >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise sigma and outlier range must be >= 0");
  }
}

OrganizedPointCloud OrganizedPointCloud::empty(int width, int height, std::string frame_name) {
  OrganizedPointCloud c;
  c.width = width;
  c.height = height;
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  c.points.assign(n, Vec3::Constant(std::numeric_limits<double>::quiet_NaN()));
  c.valid.assign(n, 0);
  c.source.assign(n, kNoSource);
  c.frame_name = std::move(frame_name);
  return c;
}

std::size_t OrganizedPointCloud::valid_count() const {
  std::size_t n = 0;
  for (auto v : valid) n += v != 0;
  return n;
}

void OrganizedPointCloud::invalidate(std::size_t i) {
  valid[i] = 0;
  source[i] = kNoSource;
  points[i] = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
}

OrganizedPointCloud render_depth(const Scene& scene, const PinholeCamera& camera) {
  camera.validate();
  OrganizedPointCloud cloud =
      OrganizedPointCloud::empty(camera.width, camera.height, std::string(kCameraFrame));

  const geom::RigidTransform base_to_cam = geom::invert(scene.camera_pose);
  std::vector<TriangleMesh> meshes;
  meshes.reserve(1 + scene.background.size());
  meshes.push_back(transformed(scene.grasped_object, base_to_cam * scene.gripper_pose));
  for (const PosedMesh& bg : scene.background) {
    meshes.push_back(transformed(bg.mesh, base_to_cam * bg.pose));
  }
  const Bvh bvh(meshes);
  if (bvh.empty()) return cloud;

  for (int v = 0; v < camera.height; ++v) {
    for (int u = 0; u < camera.width; ++u) {
      const Ray ray{Vec3::Zero(), camera.ray_direction(u, v)};
      const auto hit = bvh.closest_hit(ray, camera.z_min, camera.z_max);
      if (!hit) continue;
      const std::size_t i = cloud.index(u, v);
      cloud.points[i] = ray.direction * hit->t;
      cloud.valid[i] = 1;
      cloud.source[i] = hit->source;
    }
  }
  return cloud;
}

OrganizedPointCloud add_noise(const OrganizedPointCloud& cloud, const NoiseModel& model) {
  model.validate();
  OrganizedPointCloud out = cloud;
  if (model.is_noise_free()) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out.is_valid(i)) continue;
    Rng rng(hash_combine(model.rng_seed, i));
    if (rng.uniform() < model.dropout_prob) {
      out.invalidate(i);
      continue;
    }
    const double depth = out.points[i].z();
    double perturbed;
    if (rng.uniform() < model.outlier_prob) {
      perturbed = depth + rng.uniform(-model.outlier_range, model.outlier_range);
    } else {
      perturbed = depth + model.gaussian_sigma * rng.normal();
    }
    if (!(perturbed > 0.0)) {
      out.invalidate(i);
      continue;
    }
    // Moving along the viewing ray keeps the pixel's bearing fixed.
    out.points[i] *= perturbed / depth;
  }
  return out;
}

std::vector<OrganizedPointCloud> capture_burst(const Scene& scene, const PinholeCamera& camera,
                                               const NoiseModel& model, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "burst length must be >= 1");
  model.validate();
  const OrganizedPointCloud clean = render_depth(scene, camera);
  std::vector<OrganizedPointCloud> frames;
  frames.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    NoiseModel frame_model = model;
    frame_model.rng_seed = derive_seed(model.rng_seed, static_cast<std::uint64_t>(i));
    frames.push_back(add_noise(clean, frame_model));
  }
  return frames;
}

}  // namespace kiip::sensor
