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
#include "kiip/harness/experiment.hpp"
#include "kiip/io/file.hpp"

namespace kiip::cli {

namespace {

struct ExperimentOptions {
  std::string config;
  std::string object_set;
  std::string grasp;
  std::vector<int> grips;
  std::vector<std::string> networks;
  std::string seed;
  double sigma = 0.0;
  double outlier_prob = 0.0;
  int epochs = 0;
  int pretrain_epochs = 0;
  int eval_grips = 1;
  int views = 20;
  std::string fg_model;
  std::string output_dir;
  int threads = 0;
  bool quiet = false;
  CLI::App* cmd = nullptr;
};

bool given(const ExperimentOptions& o, const char* name) { return o.cmd->count(name) > 0; }

void run_experiment_command(const ExperimentOptions& o) {
  harness::ExperimentConfig config;
  if (!o.config.empty()) {
    const std::filesystem::path path(o.config);
    config = load_input(path, [](const auto& p) {
      return harness::parse_experiment_config(io::read_text_file(p), p.parent_path());
    });
  }
  try {
    if (given(o, "--object-set")) config.object_set = harness::parse_object_set(o.object_set);
    if (given(o, "--grasp")) config.grasp = harness::parse_grasp_model(o.grasp);
    if (given(o, "--network")) {
      config.networks.clear();
      for (const std::string& n : o.networks) config.networks.push_back(nn::parse_network_kind(n));
    }
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (given(o, "--grips")) config.grips_train = o.grips;
  if (given(o, "--seed")) config.seed = parse_seed(o.seed);
  if (given(o, "--noise-sigma")) config.noise.gaussian_sigma = o.sigma;
  if (given(o, "--outlier-prob")) config.noise.outlier_prob = o.outlier_prob;
  if (given(o, "--epochs")) config.train.epochs = o.epochs;
  if (given(o, "--pretrain-epochs")) config.pretrain.epochs = o.pretrain_epochs;
  if (given(o, "--eval-grips")) config.eval_grips = o.eval_grips;
  if (given(o, "--views")) config.scan.views = o.views;
  if (given(o, "--fg-model")) config.pretrain.model = o.fg_model;
  if (given(o, "--output-dir")) config.output_dir = o.output_dir;
  if (given(o, "--threads")) config.scan.threads = o.threads;
  try {
    config.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (!config.pretrain.model.empty() && !std::filesystem::exists(config.pretrain.model)) {
    throw UsageError("no such file: '" + config.pretrain.model.string() + "'");
  }

  const harness::ExperimentResult result = harness::run_experiment(config, o.quiet ? nullptr : &std::cerr);
  harness::write_experiment_outputs(result, config);
  std::cout << harness::format_results_text(result);
  std::cout << "outputs in " << config.output_dir.string() << "\n";
}

}  // namespace

void add_experiment_command(CLI::App& app) {
  auto opt = std::make_shared<ExperimentOptions>();
  CLI::App* cmd = app.add_subcommand("experiment", "Scan an object family, train classifiers and report accuracy");
  opt->cmd = cmd;
  cmd->add_option("--config", opt->config, "Experiment JSON; flags below override it");
  cmd->add_option("--object-set", opt->object_set, "household_analog, lego_analog or user_meshes");
  cmd->add_option("--grasp", opt->grasp, "Grasp orientation model: tabletop or uniform");
  cmd->add_option("--grips", opt->grips, "Training grips per class (several values run a sweep)")->delimiter(',');
  cmd->add_option("--network", opt->networks, "fg, fg_ol and/or ol_e2e")->delimiter(',');
  cmd->add_option("--seed", opt->seed, "Root seed");
  cmd->add_option("--noise-sigma", opt->sigma, "Depth noise standard deviation (m)");
  cmd->add_option("--outlier-prob", opt->outlier_prob, "Per-pixel outlier probability");
  cmd->add_option("--epochs", opt->epochs, "Training epochs")->check(CLI::NonNegativeNumber);
  cmd->add_option("--pretrain-epochs", opt->pretrain_epochs, "Feature-generator pretraining epochs")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--eval-grips", opt->eval_grips, "Held-out grasps per class")->check(CLI::PositiveNumber);
  cmd->add_option("--views", opt->views, "Leading schedule entries to use (0..20)");
  cmd->add_option("--fg-model", opt->fg_model, "Pretrained feature-generator checkpoint");
  cmd->add_option("--output-dir", opt->output_dir, "Directory for CSV, table and grids");
  cmd->add_option("--threads", opt->threads, "Concurrent scans (0 = all cores)");
  cmd->add_flag("--quiet", opt->quiet, "No progress lines on stderr");
  cmd->callback([opt] { run_experiment_command(*opt); });
}

}  // namespace kiip::cli
