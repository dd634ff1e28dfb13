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

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kiip/nn/layers.hpp"
#include "kiip/nn/tensor.hpp"

namespace kiip::nn {

inline constexpr int kFeatureDim = 128;
inline constexpr int kInputSide = 30;

enum class NetworkKind { kFG, kFGOL, kOLE2E };

// "fg", "fg_ol", "ol_e2e".
std::string_view to_string(NetworkKind kind);
NetworkKind parse_network_kind(std::string_view name);

struct FGArchitecture {
  int conv1_filters = 32;
  int conv1_kernel = 5;
  int conv1_stride = 2;
  int conv2_filters = 32;
  int conv2_kernel = 3;
  int conv2_stride = 1;
  int input_side = kInputSide;
};

struct OLE2EArchitecture {
  int conv_filters = 32;
  int conv_kernel = 5;
  int conv_stride = 2;
  int hidden = 32;
  int input_side = kInputSide;
};

// Feature generator: two conv layers, a 128-wide dense layer whose
// activations are the features, and a pretraining head.
struct FGModel {
  Conv3DLayer conv1;
  Conv3DLayer conv2;
  DenseLayer fc1;
  DenseLayer fc_head;
  int input_side = kInputSide;

  static FGModel make(int pretrain_classes, const FGArchitecture& arch = {});
};

struct FGOLHead {
  DenseLayer dense;
};

struct OLE2EModel {
  Conv3DLayer conv;
  DenseLayer fc1;
  DenseLayer fc2;
  int input_side = kInputSide;

  static OLE2EModel make(int classes, const OLE2EArchitecture& arch = {});
};

struct FeatureEntry {
  Eigen::VectorXd feature;
  int label = 0;
};

struct ClassifierModel {
  NetworkKind kind = NetworkKind::kOLE2E;
  std::vector<std::string> labels;
  FGModel fg;                          // used by kFG and kFGOL
  FGOLHead head;                       // kFGOL only
  OLE2EModel ole2e;                    // kOLE2E only
  std::vector<FeatureEntry> nn_index;  // kFG only

  int class_count() const { return static_cast<int>(labels.size()); }
  int input_side() const { return kind == NetworkKind::kOLE2E ? ole2e.input_side : fg.input_side; }
};

struct ForwardResult {
  Eigen::VectorXd logits;
  std::optional<Eigen::VectorXd> features;
};

// 128-d penultimate activations.
Eigen::VectorXd fg_features(const FGModel& fg, const Tensor4& input);

// For kFG the logits are the pretraining head's; classification goes
// through the nearest-neighbor index instead.
ForwardResult forward(const ClassifierModel& model, const Tensor4& input);

// Euclidean nearest neighbor, ties to the lowest label id.
int fg_nearest_neighbor(std::span<const FeatureEntry> train_features,
                        const Eigen::VectorXd& query);
int fg_nearest_neighbor(const FGModel& fg, std::span<const FeatureEntry> train_features,
                        const Tensor4& query);

struct Prediction {
  int label = 0;
  Eigen::VectorXd probabilities;
};

// Argmax of the softmax, ties to the lowest id.
Prediction predict_from_logits(const Eigen::VectorXd& logits);

// kFG reports a one-hot distribution on the neighbor's label.
Prediction predict(const ClassifierModel& model, const Tensor4& input);

}  // namespace kiip::nn
