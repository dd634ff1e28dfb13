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

#include <benchmark/benchmark.h>

#include <vector>

#include "kiip/geometry.hpp"
#include "kiip/harness/robot.hpp"
#include "kiip/mesh.hpp"
#include "kiip/pipeline.hpp"
#include "kiip/sensor.hpp"

namespace {

using namespace kiip;

sensor::Scene sphere_scene(int subdivisions) {
  sensor::Scene s;
  s.grasped_object = make_icosphere(0.05, subdivisions);
  s.gripper_pose = geom::RigidTransform::from_translation({0, 0, 0.4});
  s.background.push_back({make_rectangle(2, 2), geom::RigidTransform::from_translation({0, 0, 0.8})});
  return s;
}

void BM_RenderDepth(benchmark::State& state) {
  const sensor::Scene scene = sphere_scene(static_cast<int>(state.range(0)));
  const sensor::PinholeCamera cam;
  for (auto _ : state) benchmark::DoNotOptimize(sensor::render_depth(scene, cam));
  state.counters["triangles"] = static_cast<double>(scene.grasped_object.faces.size());
}
BENCHMARK(BM_RenderDepth)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_TemporalMedian(benchmark::State& state) {
  sensor::NoiseModel m;
  m.gaussian_sigma = 0.003;
  m.outlier_prob = 0.05;
  const auto frames =
      sensor::capture_burst(sphere_scene(4), {}, m, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::temporal_median(frames));
}
BENCHMARK(BM_TemporalMedian)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_ForwardKinematics(benchmark::State& state) {
  const auto robot = harness::fixture_robot();
  const geom::JointState s = robot.arm.home;
  for (auto _ : state) benchmark::DoNotOptimize(geom::forward_kinematics(robot.arm.chain, s));
}
BENCHMARK(BM_ForwardKinematics);

void BM_RunKiip(benchmark::State& state) {
  pipeline::SceneTemplate scene;
  const pipeline::CropBox crop;
  scene.grasped_object = translated(make_icosphere(0.03, 4), crop.center());
  const auto robot = harness::fixture_robot();
  pipeline::KiipConfig cfg;
  cfg.threads = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        pipeline::run_kiip(scene, robot, {}, {}, pipeline::default_schedule(), cfg));
}
BENCHMARK(BM_RunKiip)->Unit(benchmark::kMillisecond);

}  // namespace
