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

// Central finite-difference check of loss_and_gradient, probing random
// parameters of every trainable layer. A probe whose +-h step flips any ReLU
// is not differentiable there; it is redrawn rather than scored.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "kiip/nn/layers.hpp"
#include "kiip/nn/train.hpp"
#include "kiip/rng.hpp"

namespace kiip::testing {

struct LayerCheck {
  std::string name;
  int probes = 0;
  int failures = 0;
  int kinks = 0;       // redrawn probes
  double worst = 0.0;  // largest relative error seen
};

// Relative error whose denominator never drops below scale_floor, so that
// near-zero gradients are judged on an absolute 1e-4 * floor instead of on
// finite-difference roundoff (about eps * loss / h).
inline double relative_error(double a, double b, double scale_floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), scale_floor});
}

// Sign pattern of every ReLU in the network over the batch.
inline std::vector<bool> relu_pattern(const nn::Network& net, std::span<const nn::Example> batch) {
  std::vector<bool> out;
  for (const nn::Example& e : batch) {
    nn::Tensor4 t = *e.input;
    for (const nn::Conv3DLayer* c : net.convs) {
      t = nn::conv3d_forward(*c, t);
      for (double v : t.data) out.push_back(v > 0.0);
    }
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(t.data.data(), static_cast<Eigen::Index>(t.size()));
    for (std::size_t d = 0; d + 1 < net.denses.size(); ++d) {
      x = net.denses[d]->weights * x + net.denses[d]->bias;
      for (Eigen::Index k = 0; k < x.size(); ++k) out.push_back(x(k) > 0.0);
      x = x.cwiseMax(0.0);
    }
  }
  return out;
}

inline std::vector<LayerCheck> gradient_check(const nn::Network& net,
                                              std::span<const nn::Example> batch, int probes,
                                              double h, double tolerance, std::uint64_t seed) {
  nn::Gradients g = nn::Gradients::zeros_like(net);
  nn::loss_and_gradient(net, batch, &g);
  Rng rng(seed);
  std::vector<LayerCheck> out;

  // Returns false when the probe straddles a kink.
  auto probe = [&](LayerCheck& check, double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = nn::loss_and_gradient(net, batch, nullptr);
    const std::vector<bool> up_pattern = relu_pattern(net, batch);
    param = saved - h;
    const double down = nn::loss_and_gradient(net, batch, nullptr);
    const bool smooth = relu_pattern(net, batch) == up_pattern;
    param = saved;
    if (!smooth) {
      ++check.kinks;
      return;
    }
    const double numeric = (up - down) / (2 * h);
    const double err = relative_error(analytic, numeric);
    check.worst = std::max(check.worst, err);
    ++check.probes;
    if (err > tolerance) ++check.failures;
  };

  for (std::size_t l = 0; l < net.convs.size(); ++l) {
    if (!net.trainable(l)) continue;
    nn::Conv3DLayer& c = *net.convs[l];
    LayerCheck check{"conv" + std::to_string(l + 1)};
    while (check.probes < probes && check.kinks < 10 * probes) {
      const std::size_t n = c.weights.size() + c.bias.size();
      const std::size_t i = rng.below(n);
      if (i < c.weights.size()) {
        probe(check, c.weights[i], g.conv_weights[l][i]);
      } else {
        const std::size_t b = i - c.weights.size();
        probe(check, c.bias[b], g.conv_bias[l][b]);
      }
    }
    out.push_back(check);
  }
  for (std::size_t d = 0; d < net.denses.size(); ++d) {
    if (!net.trainable(net.convs.size() + d)) continue;
    nn::DenseLayer& layer = *net.denses[d];
    LayerCheck check{"dense" + std::to_string(d + 1)};
    while (check.probes < probes && check.kinks < 10 * probes) {
      const std::size_t nw = static_cast<std::size_t>(layer.weights.size());
      const std::size_t i = rng.below(nw + static_cast<std::size_t>(layer.bias.size()));
      if (i < nw) {
        const auto r = static_cast<Eigen::Index>(i % static_cast<std::size_t>(layer.out_dim));
        const auto col = static_cast<Eigen::Index>(i / static_cast<std::size_t>(layer.out_dim));
        probe(check, layer.weights(r, col), g.dense_weights[d](r, col));
      } else {
        const auto b = static_cast<Eigen::Index>(i - nw);
        probe(check, layer.bias(b), g.dense_bias[d](b));
      }
    }
    out.push_back(check);
  }
  return out;
}

}  // namespace kiip::testing
