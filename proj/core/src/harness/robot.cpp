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
#include "kiip/harness/robot.hpp"

namespace kiip::harness {

using geom::Joint;
using geom::JointKind;
using geom::RigidTransform;

geom::ChainDescription fixture_arm(double camera_distance) {
  const double lift_home = 0.5;
  // The crop center sits 0.05 m ahead of the gripper along its +x axis; the
  // roll joint backs the gripper off by that much from the pitch axis.
  std::vector<Joint> joints;
  joints.emplace_back(JointKind::kPrismatic, Vec3::UnitZ(),
                      RigidTransform::from_translation({camera_distance, -0.65, kHeadHeight - lift_home}),
                      "lift");
  joints.emplace_back(JointKind::kRevolute, Vec3::UnitZ(), RigidTransform{}, "shoulder_yaw");
  joints.emplace_back(JointKind::kRevolute, Vec3::UnitX(),
                      RigidTransform::from_translation({0.0, 0.15, 0.0}), "elbow_1");
  joints.emplace_back(JointKind::kRevolute, Vec3::UnitX(),
                      RigidTransform::from_translation({0.0, 0.15, 0.0}), "elbow_2");
  joints.emplace_back(JointKind::kRevolute, Vec3::UnitZ(),
                      RigidTransform::from_axis_angle(Vec3::UnitZ(), kPi / 2, {0.0, 0.35, 0.0}),
                      "wrist_pitch");
  joints.emplace_back(JointKind::kRevolute, Vec3::UnitX(),
                      RigidTransform::from_translation({-0.05, 0.0, 0.0}), "wrist_roll");
  geom::KinematicChain chain(std::move(joints), "base", "gripper");
  return {std::move(chain), geom::JointState{{lift_home, 0.0, 0.0, 0.0, 0.0, 0.0}}};
}

geom::ChainDescription fixture_head() {
  // Optical frame: +z looks along base +x, +x along base -y, +y along base -z.
  Mat3 optical;
  optical.col(0) = Vec3(0.0, -1.0, 0.0);
  optical.col(1) = Vec3(0.0, 0.0, -1.0);
  optical.col(2) = Vec3(1.0, 0.0, 0.0);
  std::vector<Joint> joints;
  joints.emplace_back(JointKind::kRevolute, Vec3::UnitZ(),
                      RigidTransform::from_translation({0.0, 0.0, kHeadHeight}), "head_pan");
  joints.emplace_back(JointKind::kRevolute, Vec3::UnitX(), RigidTransform(optical, Vec3::Zero()),
                      "head_tilt");
  geom::KinematicChain chain(std::move(joints), "base", "camera");
  return {std::move(chain), geom::JointState{{0.0, 0.0}}};
}

pipeline::RobotModel fixture_robot(double camera_distance) {
  return pipeline::RobotModel{fixture_arm(camera_distance), fixture_head(), 4, 5, 0, 1};
}

}  // namespace kiip::harness
