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
#include "kiip/nn/model.hpp"

#include <limits>

#include "kiip/error.hpp"

namespace kiip::nn {

namespace {

void check_input(const Tensor4& input, int side) {
  if (input.channels != 1 || input.x != side || input.y != side || input.z != side) {
    throw Error(ErrorCode::kShapeMismatch,
                "model expects a 1x" + std::to_string(side) + "^3 input, got " +
                    std::to_string(input.channels) + "x" + std::to_string(input.x) + "x" +
                    std::to_string(input.y) + "x" + std::to_string(input.z));
  }
}

Eigen::VectorXd flatten(const Tensor4& t) {
  return Eigen::Map<const Eigen::VectorXd>(t.data.data(), static_cast<Eigen::Index>(t.size()));
}

Eigen::VectorXd dense_relu(const DenseLayer& layer, const Eigen::VectorXd& x) {
  return (layer.weights * x + layer.bias).cwiseMax(0.0);
}

}  // namespace

std::string_view to_string(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::kFG: return "fg";
    case NetworkKind::kFGOL: return "fg_ol";
    case NetworkKind::kOLE2E: return "ol_e2e";
  }
  return "?";
}

NetworkKind parse_network_kind(std::string_view name) {
  if (name == "fg") return NetworkKind::kFG;
  if (name == "fg_ol") return NetworkKind::kFGOL;
  if (name == "ol_e2e") return NetworkKind::kOLE2E;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown network '" + std::string(name) + "' (expected fg, fg_ol or ol_e2e)");
}

FGModel FGModel::make(int pretrain_classes, const FGArchitecture& arch) {
  FGModel m;
  m.input_side = arch.input_side;
  m.conv1 = Conv3DLayer(1, arch.conv1_filters, arch.conv1_kernel, arch.conv1_stride);
  m.conv2 = Conv3DLayer(arch.conv1_filters, arch.conv2_filters, arch.conv2_kernel, arch.conv2_stride);
  const int s2 = m.conv2.output_size(m.conv1.output_size(arch.input_side));
  m.fc1 = DenseLayer(arch.conv2_filters * s2 * s2 * s2, kFeatureDim);
  m.fc_head = DenseLayer(kFeatureDim, pretrain_classes);
  return m;
}

OLE2EModel OLE2EModel::make(int classes, const OLE2EArchitecture& arch) {
  OLE2EModel m;
  m.input_side = arch.input_side;
  m.conv = Conv3DLayer(1, arch.conv_filters, arch.conv_kernel, arch.conv_stride);
  const int s = m.conv.output_size(arch.input_side);
  m.fc1 = DenseLayer(arch.conv_filters * s * s * s, arch.hidden);
  m.fc2 = DenseLayer(arch.hidden, classes);
  return m;
}

Eigen::VectorXd fg_features(const FGModel& fg, const Tensor4& input) {
  check_input(input, fg.input_side);
  const Tensor4 a1 = conv3d_forward(fg.conv1, input);
  const Tensor4 a2 = conv3d_forward(fg.conv2, a1);
  return dense_relu(fg.fc1, flatten(a2));
}

ForwardResult forward(const ClassifierModel& model, const Tensor4& input) {
  ForwardResult r;
  switch (model.kind) {
    case NetworkKind::kFG: {
      Eigen::VectorXd f = fg_features(model.fg, input);
      r.logits = model.fg.fc_head.weights * f + model.fg.fc_head.bias;
      r.features = std::move(f);
      break;
    }
    case NetworkKind::kFGOL: {
      Eigen::VectorXd f = fg_features(model.fg, input);
      r.logits = model.head.dense.weights * f + model.head.dense.bias;
      r.features = std::move(f);
      break;
    }
    case NetworkKind::kOLE2E: {
      check_input(input, model.ole2e.input_side);
      const Tensor4 a = conv3d_forward(model.ole2e.conv, input);
      const Eigen::VectorXd h = dense_relu(model.ole2e.fc1, flatten(a));
      r.logits = model.ole2e.fc2.weights * h + model.ole2e.fc2.bias;
      break;
    }
  }
  return r;
}

int fg_nearest_neighbor(std::span<const FeatureEntry> train_features,
                        const Eigen::VectorXd& query) {
  if (train_features.empty()) {
    throw Error(ErrorCode::kEmptyTrainingSet, "nearest-neighbor index has no entries");
  }
  double best = std::numeric_limits<double>::infinity();
  int label = 0;
  for (const FeatureEntry& e : train_features) {
    if (e.feature.size() != query.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "feature dimension mismatch");
    }
    const double d = (e.feature - query).squaredNorm();
    if (d < best || (d == best && e.label < label)) {
      best = d;
      label = e.label;
    }
  }
  return label;
}

int fg_nearest_neighbor(const FGModel& fg, std::span<const FeatureEntry> train_features,
                        const Tensor4& query) {
  if (train_features.empty()) {
    throw Error(ErrorCode::kEmptyTrainingSet, "nearest-neighbor index has no entries");
  }
  return fg_nearest_neighbor(train_features, fg_features(fg, query));
}

Prediction predict_from_logits(const Eigen::VectorXd& logits) {
  Prediction p;
  p.probabilities = softmax(logits);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  p.label = static_cast<int>(best);
  return p;
}

Prediction predict(const ClassifierModel& model, const Tensor4& input) {
  if (model.kind == NetworkKind::kFG) {
    Prediction p;
    p.label = fg_nearest_neighbor(model.fg, model.nn_index, input);
    p.probabilities = Eigen::VectorXd::Zero(model.class_count());
    if (p.label < p.probabilities.size()) p.probabilities[p.label] = 1.0;
    return p;
  }
  return predict_from_logits(forward(model, input).logits);
}

}  // namespace kiip::nn
