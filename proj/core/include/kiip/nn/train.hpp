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
#include <span>
#include <string>
#include <vector>

#include "kiip/nn/model.hpp"
#include "kiip/pipeline.hpp"

namespace kiip::nn {

enum class Optimizer { kSgd, kAdam };

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 100;
  int batch_size = 8;
  std::uint64_t rng_seed = 0;
  Optimizer optimizer = Optimizer::kAdam;
  double weight_init_scale = 1.0;
  double momentum = 0.0;  // sgd only
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  // Per-example work inside a batch; results are identical for any value.
  int threads = 1;
  // FG-OL only: run the frozen trunk once per example up front instead of
  // on every step.
  bool cache_frozen_features = false;
  OLE2EArchitecture ole2e;

  // Throws kInvalidArgument.
  void validate() const;
};

struct LabeledGrid {
  pipeline::OccupancyGrid grid;
  int label = 0;
  std::string provenance;
};

struct TrainingReport {
  double wall_seconds = 0.0;
  // Time spent in frozen-trunk forwards (FG-OL) or building the
  // nearest-neighbor index (FG). Included in wall_seconds.
  double feature_seconds = 0.0;
  std::vector<double> loss_curve;  // mean training loss per epoch
  double train_accuracy = 0.0;
  int epochs_run = 0;
};

struct TrainResult {
  ClassifierModel model;
  TrainingReport report;
};

// Sequential view over a model's layers: convs, flatten, dense layers, with
// ReLU after every layer except the last. The first frozen_layers layers
// (convs counted first) receive no updates.
struct Network {
  std::vector<Conv3DLayer*> convs;
  std::vector<DenseLayer*> denses;
  std::size_t frozen_layers = 0;

  std::size_t layer_count() const { return convs.size() + denses.size(); }
  bool trainable(std::size_t layer) const { return layer >= frozen_layers; }
};

Network network_view(ClassifierModel& model);
Network fg_pretrain_view(FGModel& fg);

struct Gradients {
  std::vector<std::vector<double>> conv_weights;
  std::vector<std::vector<double>> conv_bias;
  std::vector<Eigen::MatrixXd> dense_weights;
  std::vector<Eigen::VectorXd> dense_bias;

  // Frozen layers get empty buffers.
  static Gradients zeros_like(const Network& net);
};

struct Example {
  const Tensor4* input = nullptr;
  int label = 0;
};

// Mean softmax cross-entropy over the batch. When grads is given it is
// overwritten with the gradient of that loss for every trainable layer.
double loss_and_gradient(const Network& net, std::span<const Example> batch,
                         Gradients* grads, int threads = 1);

// Logits, one column per example.
Eigen::MatrixXd network_logits(const Network& net, std::span<const Example> batch,
                               int threads = 1);

// Initializes every layer of the view in order from one stream.
void initialize(const Network& net, std::uint64_t seed, double scale);

// Throws kEmptyClass when a vocabulary entry has no example,
// kInvalidArgument for labels outside the vocabulary, kDivergedLoss when the
// loss stops being finite. kFG and kFGOL need a pretrained feature
// generator; for kFG training only builds the nearest-neighbor index.
TrainResult train(NetworkKind kind, std::span<const LabeledGrid> data,
                  std::vector<std::string> labels, const TrainConfig& config,
                  const FGModel* feature_generator = nullptr);

// Trains the feature generator with its softmax head on a labeled corpus.
TrainResult pretrain_fg(std::span<const LabeledGrid> corpus, std::vector<std::string> labels,
                        const TrainConfig& config, const FGArchitecture& arch = {});

// Fraction of examples whose predicted label matches.
double accuracy(const ClassifierModel& model, std::span<const LabeledGrid> data);

}  // namespace kiip::nn
