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
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <memory>

#include "common.hpp"
#include "kiip/harness/objects.hpp"
#include "kiip/io/file.hpp"
#include "kiip/io/kvox.hpp"
#include "kiip/io/manifest.hpp"
#include "kiip/nn/checkpoint.hpp"
#include "kiip/nn/train.hpp"

namespace kiip::cli {

namespace {

struct Dataset {
  std::vector<std::string> labels;
  std::vector<nn::LabeledGrid> grids;
};

Dataset load_dataset(const std::string& manifest_path) {
  return load_input(manifest_path, [](const std::filesystem::path& p) {
    const io::DatasetManifest m = io::load_dataset_manifest(p);
    Dataset d;
    d.labels = m.labels;
    for (const io::DatasetEntry& e : m.entries) {
      nn::LabeledGrid g;
      g.grid = pipeline::threshold(io::read_kvox(e.grid_path), m.threshold);
      g.label = e.label;
      g.provenance = e.grid_path.string();
      d.grids.push_back(std::move(g));
    }
    return d;
  });
}

nn::ClassifierModel load_model(const std::string& path) {
  return load_input(path, [](const auto& p) { return nn::load_checkpoint(p); });
}

struct TrainOptions {
  std::string manifest;
  std::string network = "ol_e2e";
  std::string fg_model;
  std::string out = "model.kiipnn";
  std::string report;
  bool pretrain = false;
  int synthetic = 0;
  std::string seed = "0";
  nn::TrainConfig config;
  std::string optimizer = "adam";
};

std::string report_json(const nn::TrainingReport& r) {
  nlohmann::json j;
  j["wall_seconds"] = r.wall_seconds;
  j["feature_seconds"] = r.feature_seconds;
  j["epochs"] = r.epochs_run;
  j["train_accuracy"] = r.train_accuracy;
  j["loss_curve"] = r.loss_curve;
  return j.dump(2) + "\n";
}

void run_train(TrainOptions o) {
  o.config.rng_seed = parse_seed(o.seed);
  o.config.optimizer = o.optimizer == "sgd" ? nn::Optimizer::kSgd : nn::Optimizer::kAdam;
  try {
    o.config.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  nn::TrainResult result;
  if (o.pretrain) {
    Dataset d;
    if (o.synthetic > 0) {
      harness::SyntheticCorpus c = harness::synthetic_corpus(derive_seed(o.config.rng_seed, "corpus"), o.synthetic);
      d.labels = std::move(c.labels);
      d.grids = std::move(c.grids);
    } else if (!o.manifest.empty()) {
      d = load_dataset(o.manifest);
    } else {
      throw UsageError("--pretrain needs --manifest or --synthetic");
    }
    result = nn::pretrain_fg(d.grids, d.labels, o.config);
  } else {
    if (o.manifest.empty()) throw UsageError("--manifest is required");
    nn::NetworkKind kind;
    try {
      kind = nn::parse_network_kind(o.network);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    std::optional<nn::FGModel> fg;
    if (kind != nn::NetworkKind::kOLE2E) {
      if (o.fg_model.empty()) throw UsageError(o.network + " needs --fg-model (see train --pretrain)");
      fg = load_model(o.fg_model).fg;
    }
    const Dataset d = load_dataset(o.manifest);
    result = nn::train(kind, d.grids, d.labels, o.config, fg ? &*fg : nullptr);
  }
  nn::save_checkpoint(result.model, o.out);
  if (!o.report.empty()) io::write_file_atomic(o.report, report_json(result.report));
  std::printf("trained %s: %d epochs, %.2f s (feature %.2f s), train accuracy %.1f%%, model %s\n",
              std::string(nn::to_string(result.model.kind)).c_str(), result.report.epochs_run,
              result.report.wall_seconds, result.report.feature_seconds,
              100.0 * result.report.train_accuracy, o.out.c_str());
}

struct PredictOptions {
  std::string model;
  std::vector<std::string> grids;
  std::string manifest;
  std::uint32_t threshold = pipeline::kDefaultMinCount;
};

void print_prediction(const std::string& name, const nn::ClassifierModel& m, const nn::Prediction& p) {
  std::printf("%s\t%s", name.c_str(), m.labels[static_cast<std::size_t>(p.label)].c_str());
  for (Eigen::Index i = 0; i < p.probabilities.size(); ++i) {
    std::printf("%s%.6f", i == 0 ? "\t" : ",", p.probabilities[i]);
  }
  std::printf("\n");
}

void run_predict(const PredictOptions& o) {
  if (o.grids.empty() == o.manifest.empty()) throw UsageError("give either --grid or --manifest");
  const nn::ClassifierModel model = load_model(o.model);
  if (model.kind == nn::NetworkKind::kFG && model.nn_index.empty()) {
    throw UsageError("'" + o.model + "' is a bare feature generator; train it with --network fg first");
  }
  if (!o.manifest.empty()) {
    const Dataset d = load_dataset(o.manifest);
    if (d.labels != model.labels) throw UsageError("manifest labels differ from the model's labels");
    int correct = 0;
    for (const nn::LabeledGrid& g : d.grids) {
      const nn::Prediction p = nn::predict(model, nn::from_occupancy(g.grid));
      print_prediction(g.provenance, model, p);
      correct += p.label == g.label;
    }
    std::printf("accuracy %d/%zu\n", correct, d.grids.size());
    return;
  }
  for (const std::string& path : o.grids) {
    const pipeline::VoxelCountGrid counts = load_input(path, [](const auto& p) { return io::read_kvox(p); });
    print_prediction(path, model, nn::predict(model, nn::from_occupancy(pipeline::threshold(counts, o.threshold))));
  }
}

}  // namespace

void add_train_command(CLI::App& app) {
  auto opt = std::make_shared<TrainOptions>();
  CLI::App* cmd = app.add_subcommand("train", "Train a classifier (or pretrain the feature generator)");
  cmd->add_option("--manifest", opt->manifest, "Dataset manifest JSON");
  cmd->add_option("--network", opt->network, "fg, fg_ol or ol_e2e")->capture_default_str();
  cmd->add_option("--fg-model", opt->fg_model, "Feature-generator checkpoint for fg / fg_ol");
  cmd->add_flag("--pretrain", opt->pretrain, "Pretrain the feature generator with its softmax head");
  cmd->add_option("--synthetic", opt->synthetic, "With --pretrain: built-in corpus, instances per class");
  cmd->add_option("--out", opt->out, "Output checkpoint")->capture_default_str();
  cmd->add_option("--report", opt->report, "Write the training report (JSON) here");
  cmd->add_option("--epochs", opt->config.epochs, "Epochs")->capture_default_str();
  cmd->add_option("--lr", opt->config.learning_rate, "Learning rate")->capture_default_str();
  cmd->add_option("--batch", opt->config.batch_size, "Batch size")->capture_default_str();
  cmd->add_option("--optimizer", opt->optimizer, "adam or sgd")
      ->check(CLI::IsMember({"adam", "sgd"}))->capture_default_str();
  cmd->add_option("--init-scale", opt->config.weight_init_scale, "He-normal scale factor")->capture_default_str();
  cmd->add_option("--seed", opt->seed, "Seed for initialization and shuffling")->capture_default_str();
  cmd->add_option("--threads", opt->config.threads, "Per-example worker threads")->capture_default_str();
  cmd->callback([opt] { run_train(*opt); });
}

void add_predict_command(CLI::App& app) {
  auto opt = std::make_shared<PredictOptions>();
  CLI::App* cmd = app.add_subcommand("predict", "Classify KVOX grids with a trained checkpoint");
  cmd->add_option("--model", opt->model, "Checkpoint (KIIPNN1)")->required();
  cmd->add_option("--grid", opt->grids, "KVOX grids to classify");
  cmd->add_option("--manifest", opt->manifest, "Dataset manifest; also prints accuracy");
  cmd->add_option("--threshold", opt->threshold, "Count threshold for --grid inputs")->capture_default_str();
  cmd->callback([opt] { run_predict(*opt); });
}

}  // namespace kiip::cli
