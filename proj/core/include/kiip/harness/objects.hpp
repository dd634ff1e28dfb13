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
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kiip/geometry.hpp"
#include "kiip/io/voxelize.hpp"
#include "kiip/mesh.hpp"
#include "kiip/nn/train.hpp"
#include "kiip/rng.hpp"

namespace kiip::harness {

enum class ObjectSet { kHousehold, kLego, kUserMeshes };

// "household_analog", "lego_analog", "user_meshes".
std::string_view to_string(ObjectSet set);
ObjectSet parse_object_set(std::string_view name);

// Object axis that can face up when the object rests on a table.
enum class RestingFace { kPosX, kNegX, kPosY, kNegY, kPosZ, kNegZ };

// Union of closed part meshes, centered on the origin. Parts may overlap.
struct ObjectShape {
  std::string name;
  std::vector<TriangleMesh> parts;
  // Stable resting poses; empty means any of the six.
  std::vector<RestingFace> resting_faces = {};

  TriangleMesh merged() const;
  // Largest vertex distance from the origin.
  double bounding_radius() const;
};

// Any rotation of an object within this radius, offset by up to the default
// grasp offset, stays inside the default crop box.
inline constexpr double kMaxObjectRadius = 0.043;
inline constexpr double kDefaultGraspOffset = 0.005;

struct ObjectFamily {
  std::string name;
  std::vector<std::string> labels;
  // Builds one instance of a class. A non-null rng requests a re-built
  // variant (same structure, perturbed appearance).
  std::function<ObjectShape(int label, Rng* variant)> make;
};

ObjectFamily household_family();
// Evaluation variants jitter each block by up to 2 mm per axis.
ObjectFamily lego_family();

struct UserMesh {
  std::string label;
  std::filesystem::path path;
};
// Loads OFF or PLY meshes, centers them and scales them to kMaxObjectRadius.
ObjectFamily user_mesh_family(const std::vector<UserMesh>& meshes);

// Scales about the origin so the bounding radius is at most max_radius, after
// moving the bounding-box center to the origin.
ObjectShape fit_to_radius(ObjectShape shape, double max_radius);

// Per-part solid voxelization, OR-ed, of the shape placed by pose.
io::MeshVoxelization solid_voxels(const ObjectShape& shape, const geom::RigidTransform& pose,
                                  const pipeline::CropBox& box);

// |A xor B| / max(|A|, |B|).
double voxel_difference(const io::MeshVoxelization& a, const io::MeshVoxelization& b);

enum class GraspModel {
  // Object picked off a table from above: one of its resting faces points
  // up at the gripper, any spin about the approach axis (+x), tilt up to
  // kTabletopTilt about the other two axes.
  kTabletop,
  // Uniform over SO(3) (Shoemake).
  kUniform,
};

inline constexpr double kTabletopTilt = 15.0 * kPi / 180.0;

// "tabletop", "uniform".
std::string_view to_string(GraspModel model);
GraspModel parse_grasp_model(std::string_view name);

// Random orientation plus a uniform offset of up to max_offset per axis
// around the crop center. Object -> gripper.
geom::RigidTransform sample_grasp(Rng& rng, const pipeline::CropBox& box,
                                  double max_offset = kDefaultGraspOffset,
                                  GraspModel model = GraspModel::kTabletop,
                                  std::span<const RestingFace> faces = {});

// Octant 0..7 of the rotation's unit quaternion (scalar part made
// non-negative), from the signs of its vector part.
int rotation_octant(const Mat3& rotation);

// Built-in pretraining corpus for the feature generator: randomized
// primitive solids under random rotations, surface-voxelized.
struct SyntheticCorpus {
  std::vector<std::string> labels;
  std::vector<nn::LabeledGrid> grids;
};
SyntheticCorpus synthetic_corpus(std::uint64_t seed, int per_class,
                                 const pipeline::CropBox& box = {});

}  // namespace kiip::harness
