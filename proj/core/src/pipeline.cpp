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

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <thread>

#include "kiip/error.hpp"
#include "kiip/rng.hpp"

namespace kiip::pipeline {

using sensor::OrganizedPointCloud;

WristSchedule default_schedule() {
  WristSchedule s;
  for (int i = 0; i < 13; ++i) s.poses.push_back({deg_to_rad(-180.0 + 30.0 * i), 0.0, false});
  for (double p : {20.0, 40.0, 60.0}) s.poses.push_back({0.0, deg_to_rad(p), false});
  for (double p : {0.0, 20.0, 40.0, 60.0}) s.poses.push_back({0.0, deg_to_rad(p), true});
  return s;
}

void CropBox::validate() const {
  if (!((max_corner.array() > min_corner.array()).all())) {
    throw Error(ErrorCode::kInvalidArgument, "crop box max must exceed min on every axis");
  }
}

bool CropBox::is_cube() const {
  const Vec3 e = extent();
  return std::abs(e.x() - e.y()) <= 1e-12 * e.x() && std::abs(e.x() - e.z()) <= 1e-12 * e.x();
}

CropBox CropBox::cube(const Vec3& center, double edge) {
  return {center - Vec3::Constant(edge / 2), center + Vec3::Constant(edge / 2)};
}

Vec3 voxel_size(const CropBox& crop) { return crop.extent() / kGridResolution; }

Vec3 voxel_center(const CropBox& crop, VoxelIndex idx) {
  const Vec3 size = voxel_size(crop);
  return crop.min_corner +
         Vec3((idx.x + 0.5) * size.x(), (idx.y + 0.5) * size.y(), (idx.z + 0.5) * size.z());
}

std::uint64_t VoxelCountGrid::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

VoxelCountGrid& VoxelCountGrid::operator+=(const VoxelCountGrid& other) {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

std::size_t OccupancyGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), 1));
}

OrganizedPointCloud temporal_median(std::span<const OrganizedPointCloud> frames) {
  if (frames.empty()) throw Error(ErrorCode::kInvalidArgument, "temporal median needs frames");
  const OrganizedPointCloud& first = frames.front();
  for (const OrganizedPointCloud& f : frames) {
    if (f.width != first.width || f.height != first.height || f.size() != first.size() ||
        f.frame_name != first.frame_name) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "frames differ in size or frame (" + std::to_string(f.width) + "x" +
                      std::to_string(f.height) + " '" + f.frame_name + "' vs " +
                      std::to_string(first.width) + "x" + std::to_string(first.height) + " '" +
                      first.frame_name + "')");
    }
  }
  const std::size_t n = frames.size();
  const std::size_t quorum = (n + 1) / 2;
  OrganizedPointCloud out = OrganizedPointCloud::empty(first.width, first.height, first.frame_name);
  std::vector<std::pair<double, std::size_t>> depths;
  depths.reserve(n);
  for (std::size_t i = 0; i < out.size(); ++i) {
    depths.clear();
    for (std::size_t f = 0; f < n; ++f) {
      if (frames[f].is_valid(i)) depths.emplace_back(frames[f].points[i].z(), f);
    }
    if (depths.size() < quorum) continue;
    // Ordering by (depth, frame) keeps the choice deterministic on ties.
    const std::size_t k = (depths.size() - 1) / 2;
    std::nth_element(depths.begin(), depths.begin() + static_cast<std::ptrdiff_t>(k), depths.end());
    const std::size_t chosen = depths[k].second;
    out.points[i] = frames[chosen].points[i];
    out.valid[i] = 1;
    out.source[i] = frames[chosen].source[i];
  }
  return out;
}

OrganizedPointCloud to_gripper_frame(const OrganizedPointCloud& cloud,
                                     const geom::RigidTransform& camera_to_gripper) {
  OrganizedPointCloud out = cloud;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.is_valid(i)) out.points[i] = camera_to_gripper(out.points[i]);
  }
  out.frame_name = std::string(sensor::kGripperFrame);
  return out;
}

std::vector<TaggedPoint> spatial_crop_tagged(const OrganizedPointCloud& cloud, const CropBox& box) {
  if (cloud.frame_name != sensor::kGripperFrame) {
    throw Error(ErrorCode::kWrongFrame,
                "spatial crop expects a gripper-frame cloud, got '" + cloud.frame_name + "'");
  }
  std::vector<TaggedPoint> kept;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.is_valid(i) && box.contains(cloud.points[i])) {
      kept.push_back({cloud.points[i], cloud.source[i]});
    }
  }
  return kept;
}

std::vector<Vec3> spatial_crop(const OrganizedPointCloud& cloud, const CropBox& box) {
  std::vector<Vec3> out;
  for (const TaggedPoint& p : spatial_crop_tagged(cloud, box)) out.push_back(p.position);
  return out;
}

void accumulate(std::span<const Vec3> points, VoxelCountGrid& grid) {
  const CropBox& box = grid.crop;
  const Vec3 edge = box.extent();
  for (const Vec3& p : points) {
    if (!box.contains(p)) {
      throw Error(ErrorCode::kOutOfBounds, "point (" + std::to_string(p.x()) + ", " +
                                               std::to_string(p.y()) + ", " +
                                               std::to_string(p.z()) + ") lies outside the grid");
    }
    int idx[3];
    for (int a = 0; a < 3; ++a) {
      idx[a] = static_cast<int>(std::floor((p[a] - box.min_corner[a]) * kGridResolution / edge[a]));
      // p < max can still round up to the last boundary.
      idx[a] = std::min(idx[a], kGridResolution - 1);
    }
    ++grid.counts[linear_index(idx[0], idx[1], idx[2])];
  }
}

OccupancyGrid threshold(const VoxelCountGrid& grid, std::uint32_t min_count) {
  OccupancyGrid out;
  out.crop = grid.crop;
  out.source_threshold = min_count;
  for (std::size_t i = 0; i < kVoxelCount; ++i) out.occupied[i] = grid.counts[i] >= min_count;
  return out;
}

void RobotModel::validate() const {
  auto in_range = [](int j, const geom::ChainDescription& d) {
    return j >= 0 && static_cast<std::size_t>(j) < d.chain.size();
  };
  if (!in_range(wrist_pitch_joint, arm) || !in_range(wrist_roll_joint, arm) ||
      !in_range(gimbal_pan_joint, head) || !in_range(gimbal_tilt_joint, head)) {
    throw Error(ErrorCode::kInvalidArgument, "robot joint role index outside its chain");
  }
  if (arm.home.values.size() != arm.chain.size() || head.home.values.size() != head.chain.size()) {
    throw Error(ErrorCode::kLengthMismatch, "home state length differs from chain");
  }
}

geom::JointState aim_gimbal(const RobotModel& robot, const geom::JointState& head_state,
                            const Vec3& target_base) {
  geom::JointState q = head_state;
  const auto pan = static_cast<std::size_t>(robot.gimbal_pan_joint);
  const auto tilt = static_cast<std::size_t>(robot.gimbal_tilt_joint);
  // Bearing of the target in the optical frame; zero when centered.
  auto residual = [&](const geom::JointState& s) {
    const Vec3 d = geom::invert(geom::forward_kinematics(robot.head.chain, s))(target_base);
    return Eigen::Vector2d(std::atan2(d.x(), d.z()), std::atan2(d.y(), d.z()));
  };
  for (int iter = 0; iter < 50; ++iter) {
    const Eigen::Vector2d r = residual(q);
    if (r.norm() < 1e-13) break;
    Eigen::Matrix2d jac;
    const double h = 1e-7;
    for (int c = 0; c < 2; ++c) {
      const std::size_t j = c == 0 ? pan : tilt;
      geom::JointState plus = q;
      geom::JointState minus = q;
      plus.values[j] += h;
      minus.values[j] -= h;
      jac.col(c) = (residual(plus) - residual(minus)) / (2 * h);
    }
    if (std::abs(jac.determinant()) < 1e-12) break;
    const Eigen::Vector2d step = jac.partialPivLu().solve(r);
    q.values[pan] -= step[0];
    q.values[tilt] -= step[1];
  }
  return q;
}

ViewGeometry view_geometry(const RobotModel& robot, const WristPose& pose, CameraMode mode,
                           const CropBox& crop) {
  ViewGeometry g;
  g.arm_state = robot.arm.home;
  g.arm_state.values[static_cast<std::size_t>(robot.wrist_pitch_joint)] = pose.pitch;
  g.arm_state.values[static_cast<std::size_t>(robot.wrist_roll_joint)] =
      pose.roll + (pose.flip ? kPi : 0.0);
  g.gripper_pose = geom::forward_kinematics(robot.arm.chain, g.arm_state);

  Vec3 target;
  if (mode == CameraMode::kTracking) {
    target = g.gripper_pose(crop.center());
  } else {
    geom::JointState home = robot.arm.home;
    home.values[static_cast<std::size_t>(robot.wrist_pitch_joint)] = 0.0;
    home.values[static_cast<std::size_t>(robot.wrist_roll_joint)] = 0.0;
    target = geom::forward_kinematics(robot.arm.chain, home)(crop.center());
  }
  g.head_state = aim_gimbal(robot, robot.head.home, target);
  g.camera_pose = geom::forward_kinematics(robot.head.chain, g.head_state);
  return g;
}

std::size_t RunManifest::total_background_points() const {
  std::size_t n = 0;
  for (const ViewRecord& v : views) n += v.background_points;
  return n;
}

namespace {

struct ViewOutput {
  VoxelCountGrid counts;
  ViewRecord record;
};

ViewOutput process_view(const SceneTemplate& scene, const RobotModel& robot,
                        const sensor::PinholeCamera& camera, const sensor::NoiseModel& noise,
                        const WristPose& pose, std::size_t view_index, const KiipConfig& config) {
  ViewOutput out;
  out.counts.crop = config.crop;
  const ViewGeometry g = view_geometry(robot, pose, config.camera_mode, config.crop);

  sensor::Scene s;
  s.grasped_object = scene.grasped_object;
  s.background = scene.background;
  s.gripper_pose = g.gripper_pose;
  s.camera_pose = g.camera_pose;

  sensor::NoiseModel view_noise = noise;
  view_noise.rng_seed = derive_seed(noise.rng_seed, static_cast<std::uint64_t>(view_index));
  const auto frames = sensor::capture_burst(s, camera, view_noise, config.frames_per_view);
  const OrganizedPointCloud median = temporal_median(frames);
  const OrganizedPointCloud in_gripper =
      to_gripper_frame(median, geom::camera_to_gripper(g.camera_pose, g.gripper_pose));
  const std::vector<TaggedPoint> kept = spatial_crop_tagged(in_gripper, config.crop);

  std::vector<Vec3> points;
  points.reserve(kept.size());
  std::size_t background = 0;
  for (const TaggedPoint& p : kept) {
    points.push_back(p.position);
    background += p.source >= sensor::kFirstBackgroundSource;
  }
  accumulate(points, out.counts);

  out.record.pose = pose;
  out.record.noise_seed = view_noise.rng_seed;
  out.record.gimbal_pan = g.head_state.values[static_cast<std::size_t>(robot.gimbal_pan_joint)];
  out.record.gimbal_tilt = g.head_state.values[static_cast<std::size_t>(robot.gimbal_tilt_joint)];
  out.record.valid_pixels = median.valid_count();
  out.record.retained_points = kept.size();
  out.record.background_points = background;
  return out;
}

}  // namespace

KiipResult run_kiip(const SceneTemplate& scene, const RobotModel& robot,
                    const sensor::PinholeCamera& camera, const sensor::NoiseModel& noise,
                    const WristSchedule& schedule, const KiipConfig& config) {
  robot.validate();
  camera.validate();
  noise.validate();
  config.crop.validate();

  const std::size_t n = schedule.poses.size();
  std::vector<ViewOutput> outputs(n);
  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : config.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t v = begin; v < n; v += stride) {
      outputs[v] = process_view(scene, robot, camera, noise, schedule.poses[v], v, config);
    }
  };
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }

  KiipResult result;
  result.counts.crop = config.crop;
  result.manifest.camera = camera;
  result.manifest.noise = noise;
  result.manifest.config = config;
  // Per-view partial grids are merged in schedule order; integer sums make
  // the result independent of which thread produced which view.
  for (ViewOutput& o : outputs) {
    result.counts += o.counts;
    result.manifest.views.push_back(o.record);
  }
  result.occupancy = threshold(result.counts, config.min_count);
  return result;
}

std::string format_run_manifest(const RunManifest& m) {
  using nlohmann::json;
  json doc;
  doc["camera"] = {{"width", m.camera.width}, {"height", m.camera.height}, {"fx", m.camera.fx},
                   {"fy", m.camera.fy},       {"cx", m.camera.cx},         {"cy", m.camera.cy},
                   {"z_min", m.camera.z_min}, {"z_max", m.camera.z_max}};
  doc["noise"] = {{"gaussian_sigma", m.noise.gaussian_sigma},
                  {"dropout_prob", m.noise.dropout_prob},
                  {"outlier_prob", m.noise.outlier_prob},
                  {"outlier_range", m.noise.outlier_range},
                  {"rng_seed", m.noise.rng_seed}};
  const CropBox& c = m.config.crop;
  doc["crop"] = {{"min", {c.min_corner.x(), c.min_corner.y(), c.min_corner.z()}},
                 {"max", {c.max_corner.x(), c.max_corner.y(), c.max_corner.z()}}};
  doc["threshold"] = m.config.min_count;
  doc["frames_per_view"] = m.config.frames_per_view;
  doc["camera_mode"] = m.config.camera_mode == CameraMode::kTracking ? "tracking" : "fixed";
  json views = json::array();
  for (const ViewRecord& v : m.views) {
    views.push_back({{"roll_deg", rad_to_deg(v.pose.roll)},
                     {"pitch_deg", rad_to_deg(v.pose.pitch)},
                     {"flip", v.pose.flip},
                     {"noise_seed", v.noise_seed},
                     {"gimbal_pan_deg", rad_to_deg(v.gimbal_pan)},
                     {"gimbal_tilt_deg", rad_to_deg(v.gimbal_tilt)},
                     {"valid_pixels", v.valid_pixels},
                     {"retained_points", v.retained_points},
                     {"background_points", v.background_points}});
  }
  doc["views"] = std::move(views);
  return doc.dump(2) + "\n";
}

}  // namespace kiip::pipeline
