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
#include <iostream>
#include <memory>

#include "common.hpp"
#include "kiip/chain_io.hpp"
#include "kiip/harness/objects.hpp"
#include "kiip/harness/robot.hpp"
#include "kiip/io/file.hpp"
#include "kiip/io/kvox.hpp"
#include "kiip/io/mesh_file.hpp"
#include "kiip/pipeline.hpp"

namespace kiip::cli {

namespace {

struct ScanOptions {
  std::string mesh;
  std::string arm;
  std::string head;
  std::string pitch_joint = "wrist_pitch";
  std::string roll_joint = "wrist_roll";
  std::string pan_joint = "head_pan";
  std::string tilt_joint = "head_tilt";
  std::vector<std::string> background;
  std::string out = "scan.kvox";
  std::string manifest;
  std::string save_chains;
  int views = 20;
  int frames = pipeline::kDefaultFramesPerView;
  std::string seed = "0";
  double sigma = 0.0;
  double outlier_prob = 0.0;
  double outlier_range = 0.05;
  double dropout_prob = 0.0;
  std::uint32_t threshold = pipeline::kDefaultMinCount;
  std::string camera_mode = "tracking";
  bool no_fit = false;
  bool random_grasp = false;
  unsigned threads = 1;
};

int joint_index(const geom::ChainDescription& d, const std::string& name, const char* role) {
  const int j = d.chain.find_joint(name);
  if (j < 0) throw UsageError(std::string(role) + " joint '" + name + "' not found in chain");
  return j;
}

void run_scan(const ScanOptions& o) {
  if (o.views < 0 || o.views > 20) throw UsageError("--views must be in 0..20");
  if (o.arm.empty() != o.head.empty()) throw UsageError("--arm and --head must be given together");
  const std::uint64_t seed = parse_seed(o.seed);

  TriangleMesh mesh = load_input(o.mesh, [](const auto& p) { return io::read_mesh_file(p); });
  mesh.remove_degenerate_faces();
  const pipeline::CropBox crop;
  if (!o.no_fit) {
    harness::ObjectShape shape = harness::fit_to_radius({"object", {std::move(mesh)}}, harness::kMaxObjectRadius);
    geom::RigidTransform grasp = geom::RigidTransform::from_translation(crop.center());
    if (o.random_grasp) {
      Rng rng(derive_seed(seed, "grasp"));
      grasp = harness::sample_grasp(rng, crop);
    }
    mesh = transformed(shape.parts.front(), grasp);
  }

  pipeline::RobotModel robot = harness::fixture_robot();
  if (!o.arm.empty()) {
    auto load_chain = [](const auto& p) { return geom::load_chain_file(p); };
    pipeline::RobotModel custom{load_input(o.arm, load_chain), load_input(o.head, load_chain)};
    custom.wrist_pitch_joint = joint_index(custom.arm, o.pitch_joint, "pitch");
    custom.wrist_roll_joint = joint_index(custom.arm, o.roll_joint, "roll");
    custom.gimbal_pan_joint = joint_index(custom.head, o.pan_joint, "pan");
    custom.gimbal_tilt_joint = joint_index(custom.head, o.tilt_joint, "tilt");
    robot = std::move(custom);
  }
  if (!o.save_chains.empty()) {
    std::filesystem::create_directories(o.save_chains);
    geom::save_chain_file(robot.arm, std::filesystem::path(o.save_chains) / "arm.json");
    geom::save_chain_file(robot.head, std::filesystem::path(o.save_chains) / "head.json");
  }

  pipeline::SceneTemplate scene;
  scene.grasped_object = std::move(mesh);
  for (const std::string& b : o.background) {
    TriangleMesh bg = load_input(b, [](const auto& p) { return io::read_mesh_file(p); });
    bg.remove_degenerate_faces();
    scene.background.push_back({std::move(bg), geom::RigidTransform{}});
  }

  sensor::NoiseModel noise;
  noise.gaussian_sigma = o.sigma;
  noise.outlier_prob = o.outlier_prob;
  noise.outlier_range = o.outlier_range;
  noise.dropout_prob = o.dropout_prob;
  noise.rng_seed = derive_seed(seed, "noise");
  try {
    noise.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  pipeline::WristSchedule schedule = pipeline::default_schedule();
  schedule.poses.resize(static_cast<std::size_t>(o.views));
  pipeline::KiipConfig config;
  config.min_count = o.threshold;
  config.frames_per_view = o.frames;
  config.camera_mode = o.camera_mode == "fixed" ? pipeline::CameraMode::kFixed : pipeline::CameraMode::kTracking;
  config.threads = o.threads;

  const pipeline::KiipResult r = pipeline::run_kiip(scene, robot, sensor::PinholeCamera{}, noise, schedule, config);
  io::write_kvox(r.counts, o.out);
  std::filesystem::path manifest = o.manifest;
  if (manifest.empty()) manifest = std::filesystem::path(o.out).replace_extension(".manifest.json");
  io::write_file_atomic(manifest, pipeline::format_run_manifest(r.manifest));
  std::cout << "views " << o.views << ", occupied voxels " << r.occupancy.occupied_count()
            << " (threshold " << o.threshold << "), grid " << o.out << ", manifest " << manifest.string()
            << "\n";
}

}  // namespace

void add_scan_command(CLI::App& app) {
  auto opt = std::make_shared<ScanOptions>();
  CLI::App* cmd = app.add_subcommand("scan", "Scan a grasped mesh through the wrist schedule into a KVOX grid");
  cmd->add_option("--mesh", opt->mesh, "Object mesh (OFF or ASCII PLY)")->required();
  cmd->add_option("--arm", opt->arm, "Arm chain JSON (tip = gripper); default: built-in fixture");
  cmd->add_option("--head", opt->head, "Head chain JSON (tip = camera optical frame)");
  cmd->add_option("--pitch-joint", opt->pitch_joint, "Wrist pitch joint name in --arm");
  cmd->add_option("--roll-joint", opt->roll_joint, "Wrist roll joint name in --arm");
  cmd->add_option("--pan-joint", opt->pan_joint, "Gimbal pan joint name in --head");
  cmd->add_option("--tilt-joint", opt->tilt_joint, "Gimbal tilt joint name in --head");
  cmd->add_option("--background", opt->background, "Clutter meshes in base-frame coordinates");
  cmd->add_option("--out", opt->out, "Output KVOX grid")->capture_default_str();
  cmd->add_option("--manifest", opt->manifest, "Run manifest JSON (default: next to --out)");
  cmd->add_option("--save-chains", opt->save_chains, "Write the arm/head chains used to this directory");
  cmd->add_option("--views", opt->views, "Leading schedule entries to use (0..20)")->capture_default_str();
  cmd->add_option("--frames", opt->frames, "Frames per view for the temporal median")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--seed", opt->seed, "Root seed for noise and grasp sampling")->capture_default_str();
  cmd->add_option("--noise-sigma", opt->sigma, "Depth noise standard deviation (m)")->capture_default_str();
  cmd->add_option("--outlier-prob", opt->outlier_prob, "Per-pixel outlier probability")->capture_default_str();
  cmd->add_option("--outlier-range", opt->outlier_range, "Outlier displacement range (m)")->capture_default_str();
  cmd->add_option("--dropout-prob", opt->dropout_prob, "Per-pixel dropout probability")->capture_default_str();
  cmd->add_option("--threshold", opt->threshold, "Minimum count for an occupied voxel")->capture_default_str();
  cmd->add_option("--camera-mode", opt->camera_mode, "Gimbal behaviour between views")
      ->check(CLI::IsMember({"tracking", "fixed"}))->capture_default_str();
  cmd->add_flag("--no-fit", opt->no_fit, "Use mesh coordinates as gripper-frame coordinates");
  cmd->add_flag("--random-grasp", opt->random_grasp, "Apply a seeded random grasp rotation and offset");
  cmd->add_option("--threads", opt->threads, "Views processed concurrently (0 = all cores)")->capture_default_str();
  cmd->callback([opt] { run_scan(*opt); });
}

}  // namespace kiip::cli
