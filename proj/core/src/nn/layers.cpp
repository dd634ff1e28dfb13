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
#include "kiip/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kiip/error.hpp"

namespace kiip::nn {

namespace {

using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
using MutMap = Eigen::Map<Eigen::MatrixXd>;

// Patch matrix, column-major P x K: column kk holds input element kk of
// every output position's receptive field.
void im2col(const Conv3DLayer& layer, const Tensor4& in, int ox, int oy, int oz,
            std::vector<double>& cols) {
  const int k = layer.kernel;
  const int s = layer.stride;
  const std::size_t p_count = static_cast<std::size_t>(ox) * oy * oz;
  cols.resize(p_count * layer.patch_size());
  double* dst = cols.data();
  for (int c = 0; c < layer.in_channels; ++c) {
    for (int dx = 0; dx < k; ++dx) {
      for (int dy = 0; dy < k; ++dy) {
        for (int dz = 0; dz < k; ++dz) {
          for (int i = 0; i < ox; ++i) {
            for (int j = 0; j < oy; ++j) {
              const double* src = &in.data[in.offset(c, i * s + dx, j * s + dy, dz)];
              for (int l = 0; l < oz; ++l) *dst++ = src[static_cast<std::ptrdiff_t>(l) * s];
            }
          }
        }
      }
    }
  }
}

void col2im_add(const Conv3DLayer& layer, const double* cols, int ox, int oy, int oz,
                Tensor4& out) {
  const int k = layer.kernel;
  const int s = layer.stride;
  const double* src = cols;
  for (int c = 0; c < layer.in_channels; ++c) {
    for (int dx = 0; dx < k; ++dx) {
      for (int dy = 0; dy < k; ++dy) {
        for (int dz = 0; dz < k; ++dz) {
          for (int i = 0; i < ox; ++i) {
            for (int j = 0; j < oy; ++j) {
              double* dst = &out.data[out.offset(c, i * s + dx, j * s + dy, dz)];
              for (int l = 0; l < oz; ++l) dst[static_cast<std::ptrdiff_t>(l) * s] += *src++;
            }
          }
        }
      }
    }
  }
}

void check_input(const Conv3DLayer& layer, const Tensor4& input) {
  if (input.channels != layer.in_channels) {
    throw Error(ErrorCode::kShapeMismatch,
                "conv expects " + std::to_string(layer.in_channels) + " channels, got " +
                    std::to_string(input.channels));
  }
  for (int d : {input.x, input.y, input.z}) {
    if (d < layer.kernel) {
      throw Error(ErrorCode::kShapeMismatch,
                  "input side " + std::to_string(d) + " smaller than kernel " +
                      std::to_string(layer.kernel));
    }
  }
}

double density(const Tensor4& t) {
  std::size_t nz = 0;
  for (double v : t.data) nz += v != 0.0;
  return t.data.empty() ? 0.0 : static_cast<double>(nz) / static_cast<double>(t.data.size());
}

bool use_scatter(ConvAlgorithm algo, const Tensor4& input, bool need_input_grad) {
  if (algo == ConvAlgorithm::kScatter) return true;
  if (algo == ConvAlgorithm::kDense || need_input_grad) return false;
  return density(input) < 0.2;
}

// Calls fn(p, kk) for every (output position, kernel offset) pair whose
// receptive field contains input voxel (c, i, j, l).
template <typename Fn>
void for_each_covering(const Conv3DLayer& layer, int c, int i, int j, int l, int ox, int oy,
                       int oz, Fn&& fn) {
  const int k = layer.kernel;
  const int s = layer.stride;
  for (int dx = 0; dx < k && dx <= i; ++dx) {
    if ((i - dx) % s) continue;
    const int px = (i - dx) / s;
    if (px >= ox) continue;
    for (int dy = 0; dy < k && dy <= j; ++dy) {
      if ((j - dy) % s) continue;
      const int py = (j - dy) / s;
      if (py >= oy) continue;
      for (int dz = 0; dz < k && dz <= l; ++dz) {
        if ((l - dz) % s) continue;
        const int pz = (l - dz) / s;
        if (pz >= oz) continue;
        const std::size_t p = (static_cast<std::size_t>(px) * oy + py) * oz + pz;
        const std::size_t kk = ((static_cast<std::size_t>(c) * k + dx) * k + dy) * k + dz;
        fn(p, kk);
      }
    }
  }
}

template <typename Fn>
void for_each_nonzero(const Tensor4& in, Fn&& fn) {
  for (int c = 0; c < in.channels; ++c) {
    for (int i = 0; i < in.x; ++i) {
      for (int j = 0; j < in.y; ++j) {
        const double* row = &in.data[in.offset(c, i, j, 0)];
        for (int l = 0; l < in.z; ++l) {
          if (row[l] != 0.0) fn(c, i, j, l, row[l]);
        }
      }
    }
  }
}

}  // namespace

Conv3DLayer::Conv3DLayer(int in_ch, int n_filters, int k, int s)
    : in_channels(in_ch), filters(n_filters), kernel(k), stride(s) {
  if (in_ch < 1 || n_filters < 1 || k < 1 || s < 1) {
    throw Error(ErrorCode::kInvalidArgument, "conv layer dimensions must be positive");
  }
  weights.assign(static_cast<std::size_t>(n_filters) * patch_size(), 0.0);
  bias.assign(static_cast<std::size_t>(n_filters), 0.0);
}

int Conv3DLayer::output_size(int input_size) const {
  if (input_size < kernel) {
    throw Error(ErrorCode::kShapeMismatch, "input side " + std::to_string(input_size) +
                                               " smaller than kernel " + std::to_string(kernel));
  }
  return (input_size - kernel) / stride + 1;
}

DenseLayer::DenseLayer(int in, int out)
    : in_dim(in), out_dim(out), weights(Eigen::MatrixXd::Zero(out, in)),
      bias(Eigen::VectorXd::Zero(out)) {
  if (in < 1 || out < 1) throw Error(ErrorCode::kInvalidArgument, "dense layer dims must be positive");
}

void initialize(Conv3DLayer& layer, Rng& rng, double scale) {
  const double sd = scale * std::sqrt(2.0 / static_cast<double>(layer.patch_size()));
  for (double& w : layer.weights) w = sd * rng.normal();
  std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
}

void initialize(DenseLayer& layer, Rng& rng, double scale) {
  const double sd = scale * std::sqrt(2.0 / layer.in_dim);
  // Column-major fill order; any fixed order keeps initialization reproducible.
  for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = sd * rng.normal();
  layer.bias.setZero();
}

Tensor4 conv3d_preactivation(const Conv3DLayer& layer, const Tensor4& input, ConvAlgorithm algo) {
  check_input(layer, input);
  const int ox = layer.output_size(input.x);
  const int oy = layer.output_size(input.y);
  const int oz = layer.output_size(input.z);
  Tensor4 out(layer.filters, ox, oy, oz);
  const auto p_count = static_cast<Eigen::Index>(out.spatial());
  const auto k_size = static_cast<Eigen::Index>(layer.patch_size());
  const int f_count = layer.filters;

  if (use_scatter(algo, input, false)) {
    // Transposed accumulator (P x F, filter fastest) keeps the inner loop contiguous.
    std::vector<double> wt(static_cast<std::size_t>(k_size) * f_count);
    for (int f = 0; f < f_count; ++f) {
      for (Eigen::Index kk = 0; kk < k_size; ++kk) {
        wt[static_cast<std::size_t>(kk) * f_count + f] = layer.weights[f * k_size + kk];
      }
    }
    std::vector<double> acc(static_cast<std::size_t>(p_count) * f_count, 0.0);
    for_each_nonzero(input, [&](int c, int i, int j, int l, double v) {
      for_each_covering(layer, c, i, j, l, ox, oy, oz, [&](std::size_t p, std::size_t kk) {
        double* dst = &acc[p * f_count];
        const double* w = &wt[kk * f_count];
        for (int f = 0; f < f_count; ++f) dst[f] += v * w[f];
      });
    });
    for (int f = 0; f < f_count; ++f) {
      double* dst = &out.data[static_cast<std::size_t>(f) * p_count];
      for (Eigen::Index p = 0; p < p_count; ++p) {
        dst[p] = acc[static_cast<std::size_t>(p) * f_count + f] + layer.bias[f];
      }
    }
    return out;
  }

  thread_local std::vector<double> cols;
  im2col(layer, input, ox, oy, oz, cols);
  ConstMap col_mat(cols.data(), p_count, k_size);
  ConstMap wt(layer.weights.data(), k_size, f_count);
  MutMap out_mat(out.data.data(), p_count, f_count);
  out_mat.noalias() = col_mat * wt;
  for (int f = 0; f < f_count; ++f) out_mat.col(f).array() += layer.bias[f];
  return out;
}

Tensor4 conv3d_forward(const Conv3DLayer& layer, const Tensor4& input, ConvAlgorithm algo) {
  Tensor4 out = conv3d_preactivation(layer, input, algo);
  relu_inplace(out);
  return out;
}

void conv3d_backward(const Conv3DLayer& layer, const Tensor4& input, const Tensor4& grad_pre,
                     std::span<double> grad_weights, std::span<double> grad_bias,
                     Tensor4* grad_input, ConvAlgorithm algo) {
  check_input(layer, input);
  const int ox = layer.output_size(input.x);
  const int oy = layer.output_size(input.y);
  const int oz = layer.output_size(input.z);
  if (grad_pre.channels != layer.filters || grad_pre.x != ox || grad_pre.y != oy ||
      grad_pre.z != oz) {
    throw Error(ErrorCode::kShapeMismatch, "conv gradient has the wrong shape");
  }
  const auto p_count = static_cast<Eigen::Index>(grad_pre.spatial());
  const auto k_size = static_cast<Eigen::Index>(layer.patch_size());
  const int f_count = layer.filters;
  ConstMap dpre(grad_pre.data.data(), p_count, f_count);
  // A plain loop: Eigen's vectorized sum peels by heap alignment, which would
  // make the last bit depend on where the buffer landed.
  for (int f = 0; f < f_count; ++f) {
    const double* col = grad_pre.data.data() + static_cast<std::size_t>(f) * p_count;
    grad_bias[static_cast<std::size_t>(f)] += std::accumulate(col, col + p_count, 0.0);
  }

  if (use_scatter(algo, input, grad_input != nullptr) && grad_input == nullptr) {
    std::vector<double> dpre_t(static_cast<std::size_t>(p_count) * f_count);
    for (int f = 0; f < f_count; ++f) {
      for (Eigen::Index p = 0; p < p_count; ++p) {
        dpre_t[static_cast<std::size_t>(p) * f_count + f] = dpre(p, f);
      }
    }
    std::vector<double> dwt(static_cast<std::size_t>(k_size) * f_count, 0.0);
    for_each_nonzero(input, [&](int c, int i, int j, int l, double v) {
      for_each_covering(layer, c, i, j, l, ox, oy, oz, [&](std::size_t p, std::size_t kk) {
        double* dst = &dwt[kk * f_count];
        const double* g = &dpre_t[p * f_count];
        for (int f = 0; f < f_count; ++f) dst[f] += v * g[f];
      });
    });
    for (int f = 0; f < f_count; ++f) {
      for (Eigen::Index kk = 0; kk < k_size; ++kk) {
        grad_weights[static_cast<std::size_t>(f * k_size + kk)] +=
            dwt[static_cast<std::size_t>(kk) * f_count + f];
      }
    }
    return;
  }

  thread_local std::vector<double> cols;
  im2col(layer, input, ox, oy, oz, cols);
  ConstMap col_mat(cols.data(), p_count, k_size);
  MutMap dw(grad_weights.data(), k_size, f_count);
  dw.noalias() += col_mat.transpose() * dpre;
  if (grad_input) {
    *grad_input = Tensor4(input.channels, input.x, input.y, input.z);
    ConstMap wt(layer.weights.data(), k_size, f_count);
    thread_local std::vector<double> dcols;
    dcols.resize(cols.size());
    MutMap dcol_mat(dcols.data(), p_count, k_size);
    dcol_mat.noalias() = dpre * wt.transpose();
    col2im_add(layer, dcols.data(), ox, oy, oz, *grad_input);
  }
}

void relu_inplace(Tensor4& t) {
  for (double& v : t.data) v = v > 0.0 ? v : 0.0;
}

void relu_inplace(Eigen::MatrixXd& m) { m = m.cwiseMax(0.0); }

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double mx = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - mx).exp().matrix();
  return e / e.sum();
}

}  // namespace kiip::nn
