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
#include "kiip/geometry.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <set>

#include "kiip/error.hpp"

namespace kiip::geom {

double orthonormality_error(const Mat3& r) {
  return (r.transpose() * r - Mat3::Identity()).norm();
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  return u * v.transpose();
}

Mat3 axis_angle(const Vec3& unit_axis, double angle) {
  return Eigen::AngleAxisd(angle, unit_axis).toRotationMatrix();
}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite transform");
  }
  const double err = orthonormality_error(rotation);
  if (err > 1e-6 || rotation.determinant() < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "rotation is not in SO(3) (orthonormality error " + std::to_string(err) + ")");
  }
  if (err > kDriftTolerance) rotation_ = nearest_rotation(rotation);
}

RigidTransform RigidTransform::from_translation(const Vec3& t) {
  return RigidTransform(Mat3::Identity(), t);
}

RigidTransform RigidTransform::from_axis_angle(const Vec3& axis, double angle, const Vec3& t) {
  return RigidTransform(axis_angle(axis.normalized(), angle), t);
}

RigidTransform RigidTransform::from_matrix(const Mat4& m) {
  return RigidTransform(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

Mat4 RigidTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  // The constructor re-orthonormalizes when the product drifts.
  return RigidTransform(a.rotation() * b.rotation(),
                        a.rotation() * b.translation() + a.translation());
}

RigidTransform invert(const RigidTransform& t) {
  const Mat3 rt = t.rotation().transpose();
  return RigidTransform(rt, -(rt * t.translation()));
}

Vec3 apply(const RigidTransform& t, const Vec3& p) { return t(p); }

std::vector<Vec3> apply(const RigidTransform& t, std::span<const Vec3> points) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(t(p));
  return out;
}

Joint::Joint(JointKind kind_, const Vec3& axis_, RigidTransform fixed_offset_, std::string name_)
    : kind(kind_), axis(axis_), fixed_offset(std::move(fixed_offset_)), name(std::move(name_)) {
  const double n = axis.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::kInvalidArgument, "joint axis must be a non-zero finite vector");
  }
  axis /= n;
}

RigidTransform Joint::motion(double value) const {
  if (kind == JointKind::kRevolute) return RigidTransform(axis_angle(axis, value), Vec3::Zero());
  return RigidTransform::from_translation(axis * value);
}

KinematicChain::KinematicChain(std::vector<Joint> joints, std::string base_frame,
                               std::string tip_frame)
    : joints_(std::move(joints)),
      base_frame_(std::move(base_frame)),
      tip_frame_(std::move(tip_frame)) {
  std::set<std::string> names{base_frame_};
  if (!names.insert(tip_frame_).second) {
    throw Error(ErrorCode::kInvalidArgument, "base and tip frame names must differ");
  }
  for (const Joint& j : joints_) {
    if (j.name.empty()) continue;
    if (!names.insert(j.name).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate frame name '" + j.name + "'");
    }
  }
}

int KinematicChain::find_joint(const std::string& name) const {
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

RigidTransform forward_kinematics_prefix(const KinematicChain& chain, const JointState& state,
                                         std::size_t joint_count) {
  if (state.values.size() != chain.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "joint state has " + std::to_string(state.values.size()) +
                    " values, chain has " + std::to_string(chain.size()) + " joints");
  }
  if (joint_count > chain.size()) {
    throw Error(ErrorCode::kOutOfBounds, "joint prefix longer than chain");
  }
  RigidTransform pose;
  for (std::size_t i = 0; i < joint_count; ++i) {
    const Joint& j = chain.joints()[i];
    pose = pose * j.fixed_offset * j.motion(state.values[i]);
  }
  return pose;
}

RigidTransform forward_kinematics(const KinematicChain& chain, const JointState& state) {
  return forward_kinematics_prefix(chain, state, chain.size());
}

RigidTransform camera_to_gripper(const RigidTransform& fk_cam, const RigidTransform& fk_grip) {
  return invert(fk_grip) * fk_cam;
}

}  // namespace kiip::geom
