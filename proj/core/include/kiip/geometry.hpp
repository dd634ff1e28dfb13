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

#include <span>
#include <string>
#include <vector>

#include "kiip/types.hpp"

namespace kiip::geom {

// Frobenius norm of R^T R - I.
double orthonormality_error(const Mat3& r);

// Nearest rotation in the Frobenius sense (polar decomposition via SVD),
// with the sign fixed so that det = +1.
Mat3 nearest_rotation(const Mat3& m);

Mat3 axis_angle(const Vec3& unit_axis, double angle);

// SE(3) pose. Maps points from the child frame into the parent frame:
// p_parent = R * p_child + t.
class RigidTransform {
 public:
  static constexpr double kDriftTolerance = 1e-9;

  RigidTransform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

  // Throws kInvalidArgument when the matrix is further than 1e-6 from SO(3);
  // smaller drift is projected back onto the rotation group.
  RigidTransform(const Mat3& rotation, const Vec3& translation);

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(const Vec3& t);
  static RigidTransform from_axis_angle(const Vec3& axis, double angle,
                                        const Vec3& t = Vec3::Zero());
  static RigidTransform rot_x(double angle) { return from_axis_angle(Vec3::UnitX(), angle); }
  static RigidTransform rot_y(double angle) { return from_axis_angle(Vec3::UnitY(), angle); }
  static RigidTransform rot_z(double angle) { return from_axis_angle(Vec3::UnitZ(), angle); }
  // Accepts any 4x4 whose upper-left block is a rotation.
  static RigidTransform from_matrix(const Mat4& m);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  Mat4 matrix() const;

  Vec3 operator()(const Vec3& p) const { return rotation_ * p + translation_; }

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

// Applies b first, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& t);
Vec3 apply(const RigidTransform& t, const Vec3& p);
std::vector<Vec3> apply(const RigidTransform& t, std::span<const Vec3> points);

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return compose(a, b);
}

enum class JointKind { kRevolute, kPrismatic };

struct Joint {
  // Normalizes the axis; throws kInvalidArgument for a zero axis.
  Joint(JointKind kind, const Vec3& axis, RigidTransform fixed_offset = {},
        std::string name = {});

  JointKind kind;
  Vec3 axis;
  // Parent -> joint frame, applied before the joint motion.
  RigidTransform fixed_offset;
  std::string name;

  RigidTransform motion(double value) const;
};

// Serial chain. Throws kInvalidArgument if the base, tip or joint names
// collide.
class KinematicChain {
 public:
  KinematicChain(std::vector<Joint> joints, std::string base_frame,
                 std::string tip_frame);

  const std::vector<Joint>& joints() const { return joints_; }
  std::size_t size() const { return joints_.size(); }
  const std::string& base_frame() const { return base_frame_; }
  const std::string& tip_frame() const { return tip_frame_; }

  // Index of the joint with that name, or -1.
  int find_joint(const std::string& name) const;

 private:
  std::vector<Joint> joints_;
  std::string base_frame_;
  std::string tip_frame_;
};

struct JointState {
  std::vector<double> values;  // radians (revolute) or meters (prismatic)
};

// Base -> tip pose. Throws kLengthMismatch if the state length differs from
// the joint count.
RigidTransform forward_kinematics(const KinematicChain& chain, const JointState& state);

// Base -> frame of joint index (after its motion); joint_index == size()
// gives the tip.
RigidTransform forward_kinematics_prefix(const KinematicChain& chain,
                                         const JointState& state,
                                         std::size_t joint_count);

// Camera -> gripper transform from the two base-frame poses.
RigidTransform camera_to_gripper(const RigidTransform& fk_cam, const RigidTransform& fk_grip);

}  // namespace kiip::geom
