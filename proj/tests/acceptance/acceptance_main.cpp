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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <sys/wait.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "kiip/chain_io.hpp"
#include "kiip/error.hpp"
#include "kiip/harness/experiment.hpp"
#include "kiip/harness/objects.hpp"
#include "kiip/harness/robot.hpp"
#include "kiip/io/file.hpp"
#include "kiip/io/kvox.hpp"
#include "kiip/io/manifest.hpp"
#include "kiip/io/off.hpp"
#include "kiip/io/ply.hpp"
#include "kiip/io/voxelize.hpp"
#include "kiip/nn/checkpoint.hpp"
#include "kiip/pipeline.hpp"
#include "kiip/sensor.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;
using namespace kiip;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path g_work;

Mat3 random_rotation(Rng& rng) {
  const Vec3 axis(rng.normal(), rng.normal(), rng.normal());
  return geom::axis_angle(axis.normalized(), rng.uniform(-kPi, kPi));
}

// 1. FK against a homogeneous-matrix product over 1000 random chains.
Outcome kinematics_oracle() {
  Rng rng(20260101);
  std::vector<std::pair<geom::KinematicChain, geom::JointState>> cases;
  for (int n = 0; n < 1000; ++n) {
    std::vector<geom::Joint> joints;
    geom::JointState s;
    const int count = 1 + static_cast<int>(rng.below(7));
    for (int i = 0; i < count; ++i) {
      const auto kind = rng.below(2) ? geom::JointKind::kRevolute : geom::JointKind::kPrismatic;
      joints.emplace_back(kind, Vec3(rng.normal(), rng.normal(), rng.normal()),
                          geom::RigidTransform(random_rotation(rng),
                                               Vec3(rng.normal(), rng.normal(), rng.normal())));
      s.values.push_back(rng.uniform(-kPi, kPi));
    }
    cases.emplace_back(geom::KinematicChain(joints, "base", "tip"), s);
  }
  const auto t0 = Clock::now();
  std::vector<Mat4> got;
  got.reserve(cases.size());
  for (const auto& [chain, s] : cases) got.push_back(geom::forward_kinematics(chain, s).matrix());
  const double secs = seconds_since(t0);
  double worst = 0;
  for (std::size_t i = 0; i < cases.size(); ++i)
    worst = std::max(worst, (got[i] - testing::fk_oracle(cases[i].first, cases[i].second))
                                .cwiseAbs()
                                .maxCoeff());
  return {worst <= 1e-10 && secs < 5.0,
          fmt("max |FK - oracle| %.2e over 1000 chains (tol 1e-10); %.3f s (limit 5 s)", worst, secs)};
}

// 2. A point fixed to the gripper keeps its gripper-frame coordinates through
// the camera round trip at every schedule pose.
Outcome gripper_frame_constancy() {
  const pipeline::RobotModel robot = harness::fixture_robot();
  const pipeline::CropBox crop;
  const Vec3 markers[] = {{0.07, 0.012, -0.021}, {0.0, 0.05, 0.05}, {0.1, -0.04, 0.03}};
  double worst = 0;
  for (const auto& pose : pipeline::default_schedule().poses) {
    const auto g = pipeline::view_geometry(robot, pose, pipeline::CameraMode::kTracking, crop);
    const auto to_grip = geom::camera_to_gripper(g.camera_pose, g.gripper_pose);
    for (const Vec3& m : markers) {
      // What the camera measures: the marker carried by the arm, seen from the head.
      const Vec3 in_camera = geom::invert(g.camera_pose)(g.gripper_pose(m));
      worst = std::max(worst, (to_grip(in_camera) - m).norm());
    }
  }
  return {worst <= 1e-9, fmt("max gripper-frame deviation %.2e m over 20 poses (tol 1e-9 m)", worst)};
}

// 3. Schedule shape and angles.
Outcome schedule() {
  const auto s = pipeline::default_schedule();
  bool ok = s.poses.size() == 20;
  for (int i = 0; ok && i < 13; ++i)
    ok = std::abs(rad_to_deg(s.poses[i].roll) - (-180.0 + 30.0 * i)) < 1e-9 &&
         s.poses[i].pitch == 0.0 && !s.poses[i].flip;
  const double pitch[] = {20, 40, 60, 0, 20, 40, 60};
  for (int i = 0; ok && i < 7; ++i)
    ok = s.poses[13 + i].roll == 0.0 && std::abs(rad_to_deg(s.poses[13 + i].pitch) - pitch[i]) < 1e-9 &&
         s.poses[13 + i].flip == (i >= 3);
  return {ok, fmt("%zu poses: 13 roll (-180..180 step 30), pitch 20/40/60, flip + pitch 0/20/40/60",
                  s.poses.size())};
}

// 4. Temporal median under outliers. The ideal column is a Monte Carlo of the
// same estimator on synthetic scalars, independent of the sensor code.
Outcome median_robustness() {
  sensor::Scene scene;
  scene.grasped_object = make_icosphere(0.05, 5);
  scene.gripper_pose = geom::RigidTransform::from_translation({0, 0, 0.4});
  scene.background.push_back({make_rectangle(2, 2), geom::RigidTransform::from_translation({0, 0, 0.8})});
  const sensor::PinholeCamera cam;
  const sensor::OrganizedPointCloud clean = sensor::render_depth(scene, cam);

  // Same per-pixel model as the sensor: with probability p a uniform offset
  // in +-range, otherwise sigma * N(0, 1); then the lower median of ten.
  auto ideal = [](double sigma, double outlier_prob, double range, double tol) {
    Rng rng(77);
    int inside = 0;
    const int trials = 200000;
    std::vector<double> v(10);
    for (int t = 0; t < trials; ++t) {
      for (double& x : v)
        x = rng.uniform() < outlier_prob ? rng.uniform(-range, range) : sigma * rng.normal();
      std::nth_element(v.begin(), v.begin() + 4, v.end());
      inside += std::abs(v[4]) <= tol;
    }
    return static_cast<double>(inside) / trials;
  };

  bool all = true;
  std::string detail;
  for (double sigma : {0.0, 0.001, 0.003, 0.005}) {
    sensor::NoiseModel m;
    m.gaussian_sigma = sigma;
    m.outlier_prob = 0.2;
    m.outlier_range = 0.05;
    m.rng_seed = 1234;
    const auto frames = sensor::capture_burst(scene, cam, m, 10);
    const auto med = pipeline::temporal_median(frames);
    const double tol = 3 * sigma / std::sqrt(10.0);
    std::size_t valid = 0, within = 0;
    for (std::size_t i = 0; i < med.size(); ++i) {
      if (!med.is_valid(i)) continue;
      ++valid;
      within += std::abs(med.points[i].z() - clean.points[i].z()) <= tol;
    }
    const double frac = static_cast<double>(within) / static_cast<double>(valid);
    all &= frac >= 0.99;
    const double ideal_frac = ideal(sigma, 0.2, 0.05, tol);
    detail += fmt("sigma %.0f mm: %.2f%% (ideal median %.2f%%); ", sigma * 1e3, 100 * frac,
                  100 * ideal_frac);
  }

  // Up to four corrupted frames per pixel: exact recovery.
  Rng rng(9);
  std::vector<sensor::OrganizedPointCloud> frames(10, clean);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (!clean.is_valid(i)) continue;
    const int bad = static_cast<int>(rng.below(5));
    for (int k = 0; k < bad; ++k) {
      auto& p = frames[rng.below(10)].points[i];
      p *= rng.uniform(0.2, 3.0);
    }
  }
  const auto med = pipeline::temporal_median(frames);
  std::size_t exact = 0, valid = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (!clean.is_valid(i)) continue;
    ++valid;
    exact += med.is_valid(i) && med.points[i] == clean.points[i];
  }
  all &= exact == valid;
  detail += fmt("<=4 corrupted frames: %zu/%zu exact (need >=99%% within 3 sigma/sqrt(10))", exact, valid);
  return {all, detail};
}

// 5. Zero-noise sphere scan: no ghosts, coverage of the camera-facing surface.
Outcome ghost_free() {
  const double r = 0.03;
  const pipeline::CropBox crop;
  const Vec3 c = crop.center();
  pipeline::SceneTemplate scene;
  scene.grasped_object = translated(make_icosphere(r, 5), c);
  const pipeline::RobotModel robot = harness::fixture_robot();
  pipeline::KiipConfig cfg;
  cfg.threads = 1;
  const auto t0 = Clock::now();
  const auto result = pipeline::run_kiip(scene, robot, {}, {}, pipeline::default_schedule(), cfg);
  const double secs = seconds_since(t0);

  const double edge = pipeline::voxel_size(crop).x();
  std::size_t ghosts = 0;
  for (std::size_t i = 0; i < pipeline::kVoxelCount; ++i) {
    if (!result.occupancy.occupied[i]) continue;
    const Vec3 v = pipeline::voxel_center(crop, pipeline::voxel_index(i));
    ghosts += std::abs((v - c).norm() - r) > edge;
  }

  // Oracle surface: the one-voxel shell of cells whose center lies within
  // half an edge of the analytic sphere. A cell counts as reachable when its
  // nearest sphere point faces some camera position within 80 degrees of the
  // normal; the cap against the gripper faces none. The conservative
  // triangle-overlap surface (about 1.5 cells thick) is reported alongside.
  std::vector<Vec3> cams;
  for (const auto& pose : pipeline::default_schedule().poses) {
    const auto g = pipeline::view_geometry(robot, pose, cfg.camera_mode, crop);
    cams.push_back(geom::invert(g.gripper_pose)(g.camera_pose.translation()));
  }
  const double min_cos = std::cos(deg_to_rad(80.0));
  auto reachable_from_camera = [&](const Vec3& v) {
    const Vec3 n = (v - c).normalized();
    const Vec3 s = c + r * n;
    for (const Vec3& cam : cams)
      if (n.dot((cam - s).normalized()) >= min_cos) return true;
    return false;
  };
  const io::MeshVoxelization overlap =
      io::voxelize_mesh(translated(make_icosphere(r, 6), c), crop, io::VoxelMode::kSurface);
  std::size_t reachable = 0, covered = 0, overlap_reachable = 0, overlap_covered = 0;
  for (std::size_t i = 0; i < pipeline::kVoxelCount; ++i) {
    const Vec3 v = pipeline::voxel_center(crop, pipeline::voxel_index(i));
    const bool shell = std::abs((v - c).norm() - r) <= 0.5 * edge;
    if (!(shell || overlap.occupied[i]) || !reachable_from_camera(v)) continue;
    const bool hit = result.occupancy.occupied[i] != 0;
    if (shell) {
      ++reachable;
      covered += hit;
    }
    if (overlap.occupied[i]) {
      ++overlap_reachable;
      overlap_covered += hit;
    }
  }
  const double coverage = static_cast<double>(covered) / static_cast<double>(reachable);
  const double overlap_coverage =
      static_cast<double>(overlap_covered) / static_cast<double>(overlap_reachable);
  return {ghosts == 0 && coverage >= 0.70 && secs < 60.0,
          fmt("%zu occupied, %zu farther than 1 voxel from the surface; coverage %.1f%% of %zu "
              "reachable shell voxels (need 70%%; %.1f%% of %zu overlap-surface voxels); %.2f s "
              "(limit 60 s)",
              result.occupancy.occupied_count(), ghosts, 100 * coverage, reachable,
              100 * overlap_coverage, overlap_reachable, secs)};
}

// 6. Clutter outside the crop box never reaches the grid.
Outcome background_rejection() {
  const pipeline::CropBox crop;
  const pipeline::RobotModel robot = harness::fixture_robot();
  const auto home = pipeline::view_geometry(robot, {}, pipeline::CameraMode::kTracking, crop);
  const Vec3 center = home.gripper_pose(crop.center());
  const Vec3 cam = home.camera_pose.translation();
  const Vec3 d = (center - cam).normalized();

  pipeline::SceneTemplate scene;
  scene.grasped_object = translated(make_box({0.05, 0.04, 0.03}), crop.center());
  // A wall behind the object, a table under it and a box beside it, all at
  // least 0.1 m from the crop center (its half diagonal is 0.087 m).
  const Mat3 face_cam = geom::axis_angle(Vec3::UnitZ().cross(-d).normalized(),
                                         std::acos(Vec3::UnitZ().dot(-d)));
  scene.background.push_back({make_box({1.0, 1.0, 0.01}), geom::RigidTransform(face_cam, center + 0.2 * d)});
  scene.background.push_back({make_box({1.0, 1.0, 0.02}),
                              geom::RigidTransform::from_translation(center - Vec3(0, 0, 0.12))});
  scene.background.push_back({make_box({0.06, 0.06, 0.06}),
                              geom::RigidTransform::from_translation(center + Vec3(0, 0.16, 0))});

  pipeline::KiipConfig cfg;
  cfg.threads = 1;
  const auto with = pipeline::run_kiip(scene, robot, {}, {}, pipeline::default_schedule(), cfg);
  pipeline::SceneTemplate bare = scene;
  bare.background.clear();
  const auto without = pipeline::run_kiip(bare, robot, {}, {}, pipeline::default_schedule(), cfg);

  // The clutter must actually be in view for the check to mean anything.
  sensor::Scene s{scene.grasped_object, scene.background, home.gripper_pose, home.camera_pose};
  const auto frame = sensor::render_depth(s, {});
  std::size_t bg_pixels = 0;
  for (auto src : frame.source) bg_pixels += src >= sensor::kFirstBackgroundSource;

  const std::size_t bg = with.manifest.total_background_points();
  const bool same = with.occupancy.occupied == without.occupancy.occupied;
  return {bg == 0 && bg_pixels > 1000,
          fmt("%zu background pixels in view; %zu background points retained; occupancy %s the "
              "clutter-free scan",
              bg_pixels, bg, same ? "identical to" : "differs from (occlusion only)")};
}

// 7. Threshold boundary.
Outcome threshold_semantics() {
  pipeline::VoxelCountGrid g;
  const Vec3 a(0.01, 0.0, 0.0), b(0.05, 0.02, -0.03);
  std::vector<Vec3> pts(3, a);
  pts.insert(pts.end(), 4, b);
  pipeline::accumulate(pts, g);
  const auto o = pipeline::threshold(g);
  const bool ok = o.occupied_count() == 1 && !o.occupied[std::distance(
                      g.counts.begin(), std::find(g.counts.begin(), g.counts.end(), 3u))] &&
                  o.occupied[std::distance(g.counts.begin(),
                                           std::find(g.counts.begin(), g.counts.end(), 4u))];
  return {ok, "count 3 -> unoccupied, count 4 -> occupied (default threshold 4)"};
}

// 8. Gradient checks on the real architectures.
Outcome gradient_checks() {
  Rng rng(31);
  std::vector<nn::Tensor4> inputs;
  for (int i = 0; i < 2; ++i) {
    nn::Tensor4 t(1, 30, 30, 30);
    for (double& v : t.data) v = rng.below(6) == 0 ? 1.0 : 0.0;
    inputs.push_back(std::move(t));
  }
  const std::vector<nn::Example> batch = {{&inputs[0], 1}, {&inputs[1], 3}};

  auto small_bias = [&](const nn::Network& net) {
    for (auto* c : net.convs)
      for (double& b : c->bias) b = 0.01 * rng.normal();
    for (auto* d : net.denses)
      for (Eigen::Index k = 0; k < d->bias.size(); ++k) d->bias(k) = 0.01 * rng.normal();
  };

  std::vector<testing::LayerCheck> all;
  {
    nn::ClassifierModel m;
    m.kind = nn::NetworkKind::kOLE2E;
    m.labels = {"a", "b", "c", "d", "e"};
    m.ole2e = nn::OLE2EModel::make(5);
    const nn::Network net = nn::network_view(m);
    nn::initialize(net, 1, 1.0);
    small_bias(net);
    for (auto c : testing::gradient_check(net, batch, 100, 1e-5, 1e-4, 2)) {
      c.name = "ol_e2e." + c.name;
      all.push_back(c);
    }
  }
  nn::FGModel fg = nn::FGModel::make(10);
  {
    const nn::Network net = nn::fg_pretrain_view(fg);
    nn::initialize(net, 3, 1.0);
    small_bias(net);
    for (auto c : testing::gradient_check(net, batch, 100, 1e-5, 1e-4, 4)) {
      c.name = "fg." + c.name;
      all.push_back(c);
    }
  }
  {
    nn::ClassifierModel m;
    m.kind = nn::NetworkKind::kFGOL;
    m.labels = {"a", "b", "c", "d", "e"};
    m.fg = fg;
    m.head.dense = nn::DenseLayer(nn::kFeatureDim, 5);
    const nn::Network net = nn::network_view(m);
    nn::initialize(net, 5, 1.0);
    for (auto c : testing::gradient_check(net, batch, 100, 1e-5, 1e-4, 6)) {
      c.name = "fg_ol." + c.name;
      all.push_back(c);
    }
  }
  bool ok = !all.empty();
  std::string detail;
  for (const auto& c : all) {
    ok &= c.failures == 0 && c.probes == 100;
    detail += fmt("%s %d/%d worst %.1e (%d kinks); ", c.name.c_str(), c.probes - c.failures, c.probes,
                  c.worst, c.kinks);
  }
  detail += "(central FD h=1e-5, rel tol 1e-4, denominator floor 1e-6; probes across a ReLU kink redrawn)";
  return {ok, detail};
}

harness::ExperimentConfig desk_config(std::uint64_t seed, const fs::path& out) {
  harness::ExperimentConfig c;
  c.object_set = harness::ObjectSet::kHousehold;
  c.grips_train = {8};
  c.networks = {nn::NetworkKind::kOLE2E, nn::NetworkKind::kFGOL, nn::NetworkKind::kFG};
  c.noise.gaussian_sigma = 0.003;
  c.noise.outlier_prob = 0.05;
  c.seed = seed;
  c.output_dir = out;
  return c;
}

// 9. Household family, 8 grips, three seeds.
Outcome desk_table1() {
  const auto t0 = Clock::now();
  int ole2e_ok = 0, fgol_ok = 0;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto cfg = desk_config(seed, g_work / ("table1_seed" + std::to_string(seed)));
    const auto r = harness::run_experiment(cfg);
    harness::write_experiment_outputs(r, cfg);
    detail += fmt("seed %llu:", static_cast<unsigned long long>(seed));
    for (const auto& run : r.runs) {
      detail += fmt(" %s %.0f%%", std::string(nn::to_string(run.network)).c_str(), 100 * run.accuracy);
      if (run.network == nn::NetworkKind::kOLE2E) ole2e_ok += run.accuracy >= 0.8 - 1e-12;
      if (run.network == nn::NetworkKind::kFGOL) fgol_ok += run.accuracy >= 0.8 - 1e-12;
    }
    detail += "; ";
  }
  const double secs = seconds_since(t0);
  detail += fmt("seeds at >=80%%: ol_e2e %d/3, fg_ol %d/3 (need 2/3 each); %.0f s (limit 900 s)",
                ole2e_ok, fgol_ok, secs);
  return {ole2e_ok >= 2 && fgol_ok >= 2 && secs < 900, detail};
}

// 10. Grips sweep and training-time ordering.
Outcome desk_table2() {
  harness::ExperimentConfig cfg = desk_config(1, g_work / "table2");
  cfg.grips_train = {1, 2, 4, 8, 16};
  cfg.networks = {nn::NetworkKind::kFG, nn::NetworkKind::kFGOL, nn::NetworkKind::kOLE2E};
  const auto r = harness::run_experiment(cfg);
  harness::write_experiment_outputs(r, cfg);
  double ole2e = -1, fgol = -1, fgol_head = -1;
  for (const auto& run : r.runs) {
    if (run.grips != 16) continue;
    if (run.network == nn::NetworkKind::kOLE2E) ole2e = run.report.wall_seconds;
    if (run.network == nn::NetworkKind::kFGOL) {
      fgol = run.report.wall_seconds;
      fgol_head = run.report.wall_seconds - run.report.feature_seconds;
    }
  }
  const std::string table = io::read_text_file(cfg.output_dir / "table.csv");
  const auto rows = std::count(table.begin(), table.end(), '\n') - 1;
  const bool ok = r.runs.size() == 15 && rows == 15 && ole2e >= 0 && ole2e <= 3 * fgol && ole2e <= 120;
  return {ok, fmt("16 grips: ol_e2e %.1f s, fg_ol %.1f s (of which %.1f s outside frozen-trunk "
                  "forwards); need ol_e2e <= 3x fg_ol and <= 120 s; %ld rows in %s",
                  ole2e, fgol, fgol_head, static_cast<long>(rows),
                  (cfg.output_dir / "table.csv").c_str())};
}

// 11. Lossless round trips and the malformed-file fixtures.
Outcome parser_suite() {
  Rng rng(55);
  int trips = 0, lossless = 0;
  for (int t = 0; t < 20; ++t, ++trips) {
    TriangleMesh m = make_icosphere(rng.uniform(0.01, 1.0), 2);
    for (Vec3& v : m.vertices) v += Vec3(rng.normal(), rng.normal(), rng.normal()) * 1e-3;
    const TriangleMesh a = io::parse_off(io::format_off(m));
    const TriangleMesh b = io::parse_ply_mesh(io::format_ply_mesh(m));
    pipeline::VoxelCountGrid g;
    for (auto& c : g.counts) c = static_cast<std::uint32_t>(rng.below(3) == 0 ? rng.below(100000) : 0);
    const auto k = io::parse_kvox(io::format_kvox(g));
    lossless += a.vertices == m.vertices && a.faces == m.faces && b.vertices == m.vertices &&
                b.faces == m.faces && k.counts == g.counts;
  }
  int fixtures = 0, positioned = 0;
  for (const auto& e : fs::directory_iterator(fs::path(KIIP_FIXTURE_DIR) / "malformed")) {
    ++fixtures;
    const std::string name = e.path().filename().string();
    std::ifstream in(e.path(), std::ios::binary);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto ends = [&](std::string_view s) { return name.ends_with(s); };
    try {
      if (ends(".off")) io::parse_off(text);
      else if (ends(".ply")) io::parse_ply_mesh(text);
      else if (ends(".kvox")) io::parse_kvox(text);
      else if (ends(".chain.json")) geom::parse_chain_json(text);
      else if (ends(".manifest.json")) io::parse_dataset_manifest(text);
      else if (ends(".kiipnn")) nn::parse_checkpoint(text);
    } catch (const Error& err) {
      positioned += err.position().line.has_value() || err.position().byte_offset.has_value();
    } catch (...) {
    }
  }
  return {lossless == trips && fixtures >= 20 && positioned == fixtures,
          fmt("%d/%d OFF+PLY+KVOX round trips lossless; %d/%d malformed fixtures give a positioned error",
              lossless, trips, positioned, fixtures)};
}

int run_cli(const std::string& args) {
#ifdef KIIP_CLI_PATH
  const std::string cmd = std::string(KIIP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
  (void)args;
  return -1;
#endif
}

// Drops the timing columns, which are the only non-deterministic fields.
std::string untimed_table(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    for (int k = 0; k < 2; ++k) line = line.substr(0, line.rfind(','));
    out += line + "\n";
  }
  return out;
}

// 12. Repeated CLI runs with one seed.
Outcome determinism() {
  std::string outputs[2];
  std::string tables[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path out = g_work / ("repeat" + std::to_string(i));
    fs::remove_all(out);
    // Different scan thread counts must not matter either.
    const int code = run_cli("experiment --grips 1,2 --network fg,fg_ol,ol_e2e --seed 7 --epochs 10 "
                             "--pretrain-epochs 2 --quiet --threads " + std::to_string(i == 0 ? 1 : 3) +
                             " --output-dir " + out.string());
    if (code != 0) return {false, fmt("kiip experiment exited %d", code)};
    outputs[i] = io::read_text_file(out / "results.csv");
    tables[i] = untimed_table(io::read_text_file(out / "table.csv"));
  }
  const bool ok = outputs[0] == outputs[1] && tables[0] == tables[1] && !outputs[0].empty();
  return {ok, fmt("results.csv %s (%zu bytes); table.csv outside time columns %s",
                  outputs[0] == outputs[1] ? "byte-identical" : "DIFFERS", outputs[0].size(),
                  tables[0] == tables[1] ? "identical" : "DIFFERS")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string work = "acceptance_work";
  std::vector<int> only;
  app.add_option("--work-dir", work, "Scratch directory for experiment outputs");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  g_work = work;
  fs::create_directories(g_work);

  const std::vector<Criterion> criteria = {
      {1, "kinematics oracle", kinematics_oracle},
      {2, "gripper-frame constancy", gripper_frame_constancy},
      {3, "wrist schedule", schedule},
      {4, "median robustness", median_robustness},
      {5, "ghost-free reconstruction", ghost_free},
      {6, "background rejection", background_rejection},
      {7, "threshold semantics", threshold_semantics},
      {8, "gradient checks", gradient_checks},
      {9, "household 8-grip accuracy", desk_table1},
      {10, "grips sweep and training time", desk_table2},
      {11, "parser suite", parser_suite},
      {12, "determinism", determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (c.id < 10 ? " " : "") << c.id << "  "
              << c.name << ": " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
