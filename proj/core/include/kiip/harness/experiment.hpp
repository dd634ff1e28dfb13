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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kiip/harness/objects.hpp"
#include "kiip/harness/robot.hpp"
#include "kiip/nn/train.hpp"
#include "kiip/pipeline.hpp"
#include "kiip/sensor.hpp"

namespace kiip::harness {

struct ScanSettings {
  int views = 20;  // leading entries of the default schedule
  int frames_per_view = pipeline::kDefaultFramesPerView;
  std::uint32_t threshold = pipeline::kDefaultMinCount;
  pipeline::CameraMode camera_mode = pipeline::CameraMode::kTracking;
  double camera_distance = kCameraDistance;
  // Scans run concurrently; 0 picks the hardware concurrency.
  int threads = 0;
};

struct PretrainSettings {
  int per_class = 8;
  int epochs = 15;
  // Optional feature-generator checkpoint to use instead of pretraining.
  std::filesystem::path model;
};

struct ExperimentConfig {
  ObjectSet object_set = ObjectSet::kHousehold;
  std::vector<int> grips_train = {8};
  std::vector<nn::NetworkKind> networks = {nn::NetworkKind::kOLE2E};
  sensor::NoiseModel noise{0.003, 0.0, 0.05, 0.05, 0};
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "experiment_out";
  int eval_grips = 1;
  GraspModel grasp = GraspModel::kTabletop;
  std::vector<UserMesh> meshes;  // user_meshes only
  nn::TrainConfig train;
  PretrainSettings pretrain;
  ScanSettings scan;
  bool save_grids = true;

  // Throws kInvalidArgument.
  void validate() const;
};

// JSON mirror of ExperimentConfig; absent keys keep their defaults and
// relative paths resolve against base_dir. Errors are kFormatError.
ExperimentConfig parse_experiment_config(std::string_view text,
                                         const std::filesystem::path& base_dir = {});
std::string format_experiment_config(const ExperimentConfig& config);

struct ObjectResult {
  int object_id = 0;
  std::string label;
  int predicted = 0;
  std::string predicted_label;
};

struct RunResult {
  nn::NetworkKind network = nn::NetworkKind::kOLE2E;
  int grips = 0;
  std::vector<ObjectResult> objects;  // sorted by object id
  double accuracy = 0.0;              // fraction of evaluation instances correct
  nn::TrainingReport report;
};

struct ExperimentResult {
  std::vector<std::string> labels;
  std::vector<RunResult> runs;
  std::vector<int> grasp_octants;  // per training grip, all classes
  double scan_seconds = 0.0;
  double pretrain_seconds = 0.0;
};

// Scans every class at max(grips_train) training grasps plus eval_grips
// held-out grasps, then trains and evaluates each (grips, network) pair on
// nested subsets of the training grasps. Progress lines go to log if given.
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

// Deterministic per-object predictions (no timings).
std::string format_results_csv(const ExperimentResult& result);
// One row per (grips, network): predictions, accuracy and training time.
std::string format_table_csv(const ExperimentResult& result);
std::string format_results_text(const ExperimentResult& result);

// results.csv, table.csv, results.txt and config.json under output_dir.
void write_experiment_outputs(const ExperimentResult& result, const ExperimentConfig& config);

}  // namespace kiip::harness
