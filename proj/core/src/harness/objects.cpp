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
#include "kiip/harness/objects.hpp"

#include <algorithm>
#include <cmath>

#include "kiip/error.hpp"
#include "kiip/io/mesh_file.hpp"

namespace kiip::harness {

namespace {

constexpr int kSegments = 32;

ObjectShape centered(ObjectShape s) {
  Aabb box;
  for (const TriangleMesh& p : s.parts) box.extend(p.bounds());
  const Vec3 c = box.center();
  for (TriangleMesh& p : s.parts) p = translated(p, -c);
  return s;
}

TriangleMesh box_at(const Vec3& center, const Vec3& size) {
  return translated(make_box(size), center);
}

// Mug: vessel plus a C-shaped handle of three bars on the +x side.
ObjectShape make_mug() {
  const double r = 0.022;
  const double h = 0.048;
  const double bar = 0.006;
  ObjectShape s{"mug", {make_cup(r, r, h, 0.004, kSegments)}};
  const double reach = 0.012;
  const double x_out = r + reach - bar / 2;
  s.parts.push_back(box_at({x_out, 0.0, 0.0}, {bar, bar, 0.03}));
  for (double z : {-0.012, 0.012}) {
    s.parts.push_back(box_at({r + reach / 2 - 0.002, 0.0, z}, {reach + 0.004, bar, bar}));
  }
  s.resting_faces = {RestingFace::kPosZ};
  return centered(std::move(s));
}

ObjectShape make_bottle() {
  ObjectShape s{"bottle", {}};
  s.parts.push_back(translated(make_cylinder(0.018, 0.045, kSegments), {0.0, 0.0, -0.0175}));
  s.parts.push_back(translated(make_frustum(0.018, 0.008, 0.015, kSegments), {0.0, 0.0, 0.0125}));
  s.parts.push_back(translated(make_cylinder(0.008, 0.02, kSegments), {0.0, 0.0, 0.03}));
  // Standing, or lying on its side.
  s.resting_faces = {RestingFace::kPosZ, RestingFace::kPosX, RestingFace::kNegX,
                     RestingFace::kPosY, RestingFace::kNegY};
  return centered(std::move(s));
}

ObjectShape household_instance(int label) {
  switch (label) {
    case 0: {
      // Lies flat on its largest face.
      ObjectShape s{"box", {make_box({0.06, 0.045, 0.035})}};
      s.resting_faces = {RestingFace::kPosZ, RestingFace::kNegZ};
      return s;
    }
    case 1: return make_mug();
    case 2: {
      ObjectShape s = centered({"tapered_cup", {make_cup(0.016, 0.026, 0.055, 0.003, kSegments)}});
      s.resting_faces = {RestingFace::kPosZ};
      return s;
    }
    case 3: return make_bottle();
    case 4: return {"ball", {make_icosphere(0.03, 3)}};
    default: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "household class " + std::to_string(label) + " does not exist");
}

// Bricks on an 8 mm stud pitch, 9.6 mm tall: {x, y, layer, width, depth}.
struct Brick {
  int x, y, layer, w, d;
};

ObjectShape lego_instance(int label, Rng* variant) {
  static const std::vector<std::vector<Brick>> kAssemblies = {
      {{0, 0, 0, 2, 2}, {0, 0, 1, 2, 2}, {0, 0, 2, 2, 2}, {0, 0, 3, 2, 2}},
      {{0, 0, 0, 6, 2}, {0, 2, 0, 2, 3}, {0, 0, 1, 2, 2}},
      {{0, 0, 0, 6, 2}, {2, 2, 0, 2, 3}, {2, 0, 1, 2, 2}},
      {{0, 0, 0, 6, 2}, {0, 0, 1, 4, 2}, {0, 0, 2, 2, 2}},
      {{0, 0, 0, 2, 2}, {0, 0, 1, 2, 2}, {4, 0, 0, 2, 2}, {4, 0, 1, 2, 2}, {0, 0, 2, 6, 2}},
  };
  static const char* kNames[] = {"tower", "ell", "tee", "stairs", "arch"};
  if (label < 0 || label >= static_cast<int>(kAssemblies.size())) {
    throw Error(ErrorCode::kInvalidArgument, "lego class " + std::to_string(label) + " does not exist");
  }
  const double pitch = 0.008;
  const double height = 0.0096;
  ObjectShape s{kNames[label], {}};
  for (const Brick& b : kAssemblies[static_cast<std::size_t>(label)]) {
    Vec3 center((b.x + b.w / 2.0) * pitch, (b.y + b.d / 2.0) * pitch, (b.layer + 0.5) * height);
    if (variant) {
      for (int a = 0; a < 3; ++a) center[a] += variant->uniform(-0.002, 0.002);
    }
    s.parts.push_back(box_at(center, {b.w * pitch, b.d * pitch, height}));
  }
  return centered(std::move(s));
}

Mat3 random_rotation(Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double u3 = rng.uniform();
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  Eigen::Quaterniond q(b * std::cos(2 * kPi * u3), a * std::sin(2 * kPi * u2),
                       a * std::cos(2 * kPi * u2), b * std::sin(2 * kPi * u3));
  return q.normalized().toRotationMatrix();
}

}  // namespace

std::string_view to_string(ObjectSet set) {
  switch (set) {
    case ObjectSet::kHousehold: return "household_analog";
    case ObjectSet::kLego: return "lego_analog";
    case ObjectSet::kUserMeshes: return "user_meshes";
  }
  return "?";
}

ObjectSet parse_object_set(std::string_view name) {
  if (name == "household_analog") return ObjectSet::kHousehold;
  if (name == "lego_analog") return ObjectSet::kLego;
  if (name == "user_meshes") return ObjectSet::kUserMeshes;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown object set '" + std::string(name) +
                  "' (expected household_analog, lego_analog or user_meshes)");
}

TriangleMesh ObjectShape::merged() const { return merge(parts); }

double ObjectShape::bounding_radius() const {
  double r = 0.0;
  for (const TriangleMesh& p : parts) {
    for (const Vec3& v : p.vertices) r = std::max(r, v.norm());
  }
  return r;
}

ObjectFamily household_family() {
  ObjectFamily f;
  f.name = "household_analog";
  f.labels = {"box", "mug", "tapered_cup", "bottle", "ball"};
  f.make = [](int label, Rng*) { return fit_to_radius(household_instance(label), kMaxObjectRadius); };
  return f;
}

ObjectFamily lego_family() {
  ObjectFamily f;
  f.name = "lego_analog";
  f.labels = {"tower", "ell", "tee", "stairs", "arch"};
  f.make = [](int label, Rng* variant) {
    return fit_to_radius(lego_instance(label, variant), kMaxObjectRadius);
  };
  return f;
}

ObjectFamily user_mesh_family(const std::vector<UserMesh>& meshes) {
  if (meshes.empty()) throw Error(ErrorCode::kInvalidArgument, "user_meshes needs at least one mesh");
  ObjectFamily f;
  f.name = "user_meshes";
  std::vector<ObjectShape> shapes;
  for (const UserMesh& m : meshes) {
    TriangleMesh mesh = io::read_mesh_file(m.path);
    mesh.remove_degenerate_faces();
    f.labels.push_back(m.label);
    shapes.push_back(fit_to_radius(ObjectShape{m.label, {std::move(mesh)}}, kMaxObjectRadius));
  }
  f.make = [shapes = std::move(shapes)](int label, Rng*) {
    if (label < 0 || label >= static_cast<int>(shapes.size())) {
      throw Error(ErrorCode::kInvalidArgument, "mesh class " + std::to_string(label) + " does not exist");
    }
    return shapes[static_cast<std::size_t>(label)];
  };
  return f;
}

ObjectShape fit_to_radius(ObjectShape shape, double max_radius) {
  shape = centered(std::move(shape));
  const double r = shape.bounding_radius();
  if (r > max_radius) {
    for (TriangleMesh& p : shape.parts) p = scaled(p, max_radius / r);
  }
  return shape;
}

io::MeshVoxelization solid_voxels(const ObjectShape& shape, const geom::RigidTransform& pose,
                                  const pipeline::CropBox& box) {
  io::MeshVoxelization out;
  out.crop = box;
  out.mode = io::VoxelMode::kSolid;
  for (const TriangleMesh& p : shape.parts) {
    const io::MeshVoxelization v = io::voxelize_mesh(transformed(p, pose), box, io::VoxelMode::kSolid);
    for (std::size_t i = 0; i < out.occupied.size(); ++i) out.occupied[i] |= v.occupied[i];
  }
  return out;
}

double voxel_difference(const io::MeshVoxelization& a, const io::MeshVoxelization& b) {
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.occupied.size(); ++i) diff += (a.occupied[i] != 0) != (b.occupied[i] != 0);
  const std::size_t denom = std::max(a.occupied_count(), b.occupied_count());
  return denom == 0 ? 0.0 : static_cast<double>(diff) / static_cast<double>(denom);
}

std::string_view to_string(GraspModel model) {
  return model == GraspModel::kTabletop ? "tabletop" : "uniform";
}

GraspModel parse_grasp_model(std::string_view name) {
  if (name == "tabletop") return GraspModel::kTabletop;
  if (name == "uniform") return GraspModel::kUniform;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown grasp model '" + std::string(name) + "' (expected tabletop or uniform)");
}

geom::RigidTransform sample_grasp(Rng& rng, const pipeline::CropBox& box, double max_offset,
                                  GraspModel model, std::span<const RestingFace> faces) {
  Mat3 r;
  if (model == GraspModel::kUniform) {
    r = random_rotation(rng);
  } else {
    // Rotations taking each object axis (RestingFace order) to -x, the
    // direction pointing back up at the gripper.
    static const Mat3 kFaces[6] = {
        geom::axis_angle(Vec3::UnitZ(), kPi),      Mat3::Identity(),
        geom::axis_angle(Vec3::UnitZ(), kPi / 2),  geom::axis_angle(Vec3::UnitZ(), -kPi / 2),
        geom::axis_angle(Vec3::UnitY(), -kPi / 2), geom::axis_angle(Vec3::UnitY(), kPi / 2),
    };
    const std::size_t pick = faces.empty() ? rng.below(6) : static_cast<std::size_t>(faces[rng.below(faces.size())]);
    const Mat3& face = kFaces[pick];
    const double spin = rng.uniform(-kPi, kPi);
    const double tilt_y = rng.uniform(-kTabletopTilt, kTabletopTilt);
    const double tilt_z = rng.uniform(-kTabletopTilt, kTabletopTilt);
    r = geom::axis_angle(Vec3::UnitZ(), tilt_z) * geom::axis_angle(Vec3::UnitY(), tilt_y) *
        geom::axis_angle(Vec3::UnitX(), spin) * face;
  }
  Vec3 t = box.center();
  for (int a = 0; a < 3; ++a) t[a] += rng.uniform(-max_offset, max_offset);
  return {r, t};
}

int rotation_octant(const Mat3& rotation) {
  Eigen::Quaterniond q(rotation);
  if (q.w() < 0) q.coeffs() = -q.coeffs();
  return (q.x() < 0 ? 1 : 0) | (q.y() < 0 ? 2 : 0) | (q.z() < 0 ? 4 : 0);
}

SyntheticCorpus synthetic_corpus(std::uint64_t seed, int per_class, const pipeline::CropBox& box) {
  SyntheticCorpus corpus;
  corpus.labels = {"box",   "sphere", "cylinder", "cone",  "torus",
                   "pyramid", "capsule", "ell",    "cross", "prism"};
  auto gen = [](int label, Rng& rng) -> ObjectShape {
    auto u = [&](double lo, double hi) { return rng.uniform(lo, hi); };
    switch (label) {
      case 0: return {"box", {make_box({u(0.02, 0.07), u(0.02, 0.07), u(0.02, 0.07)})}};
      case 1: return {"sphere", {make_icosphere(u(0.015, 0.04), 2)}};
      case 2: return {"cylinder", {make_cylinder(u(0.01, 0.03), u(0.03, 0.08), 24)}};
      case 3: return {"cone", {make_frustum(u(0.015, 0.035), 0.0, u(0.03, 0.08), 24)}};
      case 4: {
        const double major = u(0.02, 0.032);
        return {"torus", {make_torus(major, u(0.005, 0.01), 24, 12)}};
      }
      case 5: return {"pyramid", {make_frustum(u(0.02, 0.04), 0.0, u(0.03, 0.07), 4)}};
      case 6: {
        const double r = u(0.01, 0.018);
        const double len = u(0.02, 0.05);
        return {"capsule", {make_cylinder(r, len, 24), translated(make_icosphere(r, 2), {0, 0, len / 2}),
                            translated(make_icosphere(r, 2), {0, 0, -len / 2})}};
      }
      case 7: {
        const double a = u(0.04, 0.07);
        const double t = u(0.01, 0.02);
        return {"ell", {box_at({0, 0, 0}, {a, t, t}), box_at({-a / 2 + t / 2, a / 2, 0}, {t, a, t})}};
      }
      case 8: {
        const double a = u(0.04, 0.07);
        const double t = u(0.01, 0.02);
        return {"cross", {make_box({a, t, t}), make_box({t, a, t}), make_box({t, t, a})}};
      }
      default: return {"prism", {make_frustum(u(0.02, 0.035), u(0.02, 0.035), u(0.03, 0.07), 3)}};
    }
  };
  const int classes = static_cast<int>(corpus.labels.size());
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      Rng rng(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(c)), static_cast<std::uint64_t>(i)));
      const ObjectShape shape = fit_to_radius(gen(c, rng), kMaxObjectRadius);
      const geom::RigidTransform pose = sample_grasp(rng, box);
      nn::LabeledGrid g;
      io::MeshVoxelization v;
      v.crop = box;
      for (const TriangleMesh& p : shape.parts) {
        const io::MeshVoxelization pv = io::voxelize_mesh(transformed(p, pose), box, io::VoxelMode::kSurface);
        for (std::size_t k = 0; k < v.occupied.size(); ++k) v.occupied[k] |= pv.occupied[k];
      }
      g.grid = v.to_occupancy();
      g.label = c;
      g.provenance = "synthetic:" + corpus.labels[static_cast<std::size_t>(c)] + ":" + std::to_string(i);
      corpus.grids.push_back(std::move(g));
    }
  }
  return corpus;
}

}  // namespace kiip::harness
