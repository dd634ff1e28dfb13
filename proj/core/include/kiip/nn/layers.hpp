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
#include <span>
#include <vector>

#include "kiip/nn/tensor.hpp"
#include "kiip/rng.hpp"

namespace kiip::nn {

// Valid (unpadded) 3D cross-correlation. Weights are laid out
// [filter][in_channel][dx][dy][dz].
struct Conv3DLayer {
  int in_channels = 1;
  int filters = 1;
  int kernel = 1;
  int stride = 1;
  std::vector<double> weights;
  std::vector<double> bias;

  Conv3DLayer() = default;
  Conv3DLayer(int in_channels, int filters, int kernel, int stride);

  // floor((in - kernel) / stride) + 1; throws kShapeMismatch when < 1.
  int output_size(int input_size) const;
  std::size_t patch_size() const {
    return static_cast<std::size_t>(in_channels) * kernel * kernel * kernel;
  }
};

struct DenseLayer {
  int in_dim = 0;
  int out_dim = 0;
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;

  DenseLayer() = default;
  DenseLayer(int in_dim, int out_dim);
};

// He-normal weights scaled by scale, zero bias.
void initialize(Conv3DLayer& layer, Rng& rng, double scale = 1.0);
void initialize(DenseLayer& layer, Rng& rng, double scale = 1.0);

enum class ConvAlgorithm {
  kAuto,    // scatter from non-zeros for sparse inputs, im2col + GEMM otherwise
  kDense,
  kScatter,
};

// Cross-correlation plus bias, before the activation.
Tensor4 conv3d_preactivation(const Conv3DLayer& layer, const Tensor4& input,
                             ConvAlgorithm algo = ConvAlgorithm::kAuto);

// Cross-correlation, bias and ReLU. Throws kShapeMismatch when the input
// channel count differs or a spatial side is smaller than the kernel.
Tensor4 conv3d_forward(const Conv3DLayer& layer, const Tensor4& input,
                       ConvAlgorithm algo = ConvAlgorithm::kAuto);

// Accumulates parameter gradients for one example given dL/d(preactivation).
// grad_input is written (not accumulated) when non-null.
void conv3d_backward(const Conv3DLayer& layer, const Tensor4& input, const Tensor4& grad_pre,
                     std::span<double> grad_weights, std::span<double> grad_bias,
                     Tensor4* grad_input, ConvAlgorithm algo = ConvAlgorithm::kAuto);

void relu_inplace(Tensor4& t);
void relu_inplace(Eigen::MatrixXd& m);

// Numerically stable softmax.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

}  // namespace kiip::nn
