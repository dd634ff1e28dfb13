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
#include "kiip/nn/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "../parallel.hpp"
#include "kiip/error.hpp"
#include "kiip/rng.hpp"

namespace kiip::nn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_network(const Network& net) {
  if (net.denses.empty()) throw Error(ErrorCode::kInvalidArgument, "network needs a dense output layer");
}

void check_labels(const Network& net, std::span<const Example> batch) {
  const int classes = net.denses.back()->out_dim;
  for (const Example& e : batch) {
    if (e.label < 0 || e.label >= classes) {
      throw Error(ErrorCode::kInvalidArgument, "label " + std::to_string(e.label) +
                                                   " outside 0.." + std::to_string(classes - 1));
    }
  }
}

Eigen::Map<const Eigen::VectorXd> as_vector(const Tensor4& t) {
  return {t.data.data(), static_cast<Eigen::Index>(t.size())};
}

// Conv stack per example; keeps every activation when acts is given.
Eigen::MatrixXd conv_stage(const Network& net, std::span<const Example> batch, int threads,
                           std::vector<std::vector<Tensor4>>* acts) {
  const std::size_t n = batch.size();
  const std::size_t c_count = net.convs.size();
  if (c_count == 0) {
    const auto dim = static_cast<Eigen::Index>(batch.front().input->size());
    Eigen::MatrixXd x(dim, static_cast<Eigen::Index>(n));
    for (std::size_t e = 0; e < n; ++e) x.col(static_cast<Eigen::Index>(e)) = as_vector(*batch[e].input);
    return x;
  }
  std::vector<std::vector<Tensor4>> local;
  std::vector<std::vector<Tensor4>>& a = acts ? *acts : local;
  a.assign(n, {});
  detail::parallel_for(n, threads, [&](std::size_t e) {
    a[e].resize(c_count);
    for (std::size_t c = 0; c < c_count; ++c) {
      a[e][c] = conv3d_forward(*net.convs[c], c == 0 ? *batch[e].input : a[e][c - 1]);
      if (!acts && c > 0) a[e][c - 1] = Tensor4();
    }
  });
  const auto dim = static_cast<Eigen::Index>(a[0].back().size());
  Eigen::MatrixXd x(dim, static_cast<Eigen::Index>(n));
  for (std::size_t e = 0; e < n; ++e) x.col(static_cast<Eigen::Index>(e)) = as_vector(a[e].back());
  return x;
}

Eigen::MatrixXd dense_apply(const DenseLayer& layer, const Eigen::MatrixXd& x, bool relu) {
  Eigen::MatrixXd z = layer.weights * x;
  z.colwise() += layer.bias;
  if (relu) relu_inplace(z);
  return z;
}

// Input to dense layer 'upto' (all earlier layers applied with ReLU).
Eigen::MatrixXd prefix_forward(const Network& net, std::span<const Example> batch,
                               std::size_t upto, int threads) {
  Eigen::MatrixXd x = conv_stage(net, batch, threads, nullptr);
  for (std::size_t l = 0; l < upto; ++l) x = dense_apply(*net.denses[l], x, true);
  return x;
}

// Dense layers [first, end) on x, softmax cross-entropy on the result.
// grad_x receives d loss / d x (before any mask of the producing ReLU).
double dense_pass(const Network& net, std::size_t first, const Eigen::MatrixXd& x,
                  std::span<const int> labels, Gradients* grads, Eigen::MatrixXd* grad_x) {
  const std::size_t d_count = net.denses.size();
  const std::size_t c_count = net.convs.size();
  const Eigen::Index b = x.cols();
  std::vector<Eigen::MatrixXd> outs;
  outs.reserve(d_count - first);
  for (std::size_t l = first; l < d_count; ++l) {
    const Eigen::MatrixXd& in = l == first ? x : outs.back();
    outs.push_back(dense_apply(*net.denses[l], in, l + 1 < d_count));
  }
  const Eigen::MatrixXd& logits = outs.back();

  double loss = 0.0;
  Eigen::MatrixXd g(logits.rows(), b);
  for (Eigen::Index e = 0; e < b; ++e) {
    const double mx = logits.col(e).maxCoeff();
    const Eigen::ArrayXd ex = (logits.col(e).array() - mx).exp();
    const double sum = ex.sum();
    loss += mx + std::log(sum) - logits(labels[static_cast<std::size_t>(e)], e);
    g.col(e) = (ex / sum).matrix();
    g(labels[static_cast<std::size_t>(e)], e) -= 1.0;
  }
  loss /= static_cast<double>(b);
  if (!grads && !grad_x) return loss;
  g /= static_cast<double>(b);

  for (std::size_t l = d_count; l-- > first;) {
    const std::size_t global = c_count + l;
    const Eigen::MatrixXd& in = l == first ? x : outs[l - first - 1];
    const DenseLayer& layer = *net.denses[l];
    if (grads && net.trainable(global)) {
      grads->dense_weights[l].noalias() = g * in.transpose();
      grads->dense_bias[l] = g.rowwise().sum();
    }
    if (global <= net.frozen_layers) break;
    if (l == first) {
      if (grad_x) grad_x->noalias() = layer.weights.transpose() * g;
      break;
    }
    Eigen::MatrixXd gin = layer.weights.transpose() * g;
    g = (in.array() > 0.0).select(gin, 0.0);
  }
  return loss;
}

struct ConvGrad {
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> b;
};

template <typename T>
void optimizer_step(std::span<double> param, std::span<const double> grad, std::span<T> m,
                    std::span<T> v, const TrainConfig& cfg, long step) {
  if (cfg.optimizer == Optimizer::kSgd) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      m[i] = cfg.momentum * m[i] + grad[i];
      param[i] -= cfg.learning_rate * m[i];
    }
    return;
  }
  const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * grad[i];
    v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
    param[i] -= cfg.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.adam_epsilon);
  }
}

struct ParamRef {
  std::span<double> param;
  std::span<const double> grad;
};

std::vector<ParamRef> parameter_refs(const Network& net, Gradients& g) {
  std::vector<ParamRef> refs;
  const std::size_t c_count = net.convs.size();
  for (std::size_t c = 0; c < c_count; ++c) {
    if (!net.trainable(c)) continue;
    refs.push_back({net.convs[c]->weights, g.conv_weights[c]});
    refs.push_back({net.convs[c]->bias, g.conv_bias[c]});
  }
  for (std::size_t l = 0; l < net.denses.size(); ++l) {
    if (!net.trainable(c_count + l)) continue;
    DenseLayer& d = *net.denses[l];
    refs.push_back({{d.weights.data(), static_cast<std::size_t>(d.weights.size())},
                    {g.dense_weights[l].data(), static_cast<std::size_t>(g.dense_weights[l].size())}});
    refs.push_back({{d.bias.data(), static_cast<std::size_t>(d.bias.size())},
                    {g.dense_bias[l].data(), static_cast<std::size_t>(g.dense_bias[l].size())}});
  }
  return refs;
}

bool all_finite(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void optimize(const Network& net, std::span<const Example> examples, const TrainConfig& cfg,
              TrainingReport& report) {
  check_network(net);
  check_labels(net, examples);
  const std::size_t n = examples.size();
  const std::size_t c_count = net.convs.size();
  // With every conv frozen the frozen prefix collapses to a feature matrix.
  const bool tail_only = net.frozen_layers >= c_count && net.frozen_layers > 0;
  const std::size_t first_dense = tail_only ? net.frozen_layers - c_count : 0;

  Eigen::MatrixXd cached;
  if (tail_only && cfg.cache_frozen_features && cfg.epochs > 0) {
    const auto t0 = Clock::now();
    cached = prefix_forward(net, examples, first_dense, cfg.threads);
    report.feature_seconds += seconds_since(t0);
  }

  Gradients grads = Gradients::zeros_like(net);
  std::vector<ParamRef> refs = parameter_refs(net, grads);
  std::vector<std::vector<double>> m(refs.size());
  std::vector<std::vector<double>> v(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    m[i].assign(refs[i].param.size(), 0.0);
    if (cfg.optimizer == Optimizer::kAdam) v[i].assign(refs[i].param.size(), 0.0);
  }

  Rng shuffle(derive_seed(cfg.rng_seed, "shuffle"));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Example> batch;
  std::vector<int> labels;
  long step = 0;
  const auto bs = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t end = std::min(n, start + bs);
      batch.clear();
      labels.clear();
      for (std::size_t k = start; k < end; ++k) {
        batch.push_back(examples[order[k]]);
        labels.push_back(examples[order[k]].label);
      }
      double loss;
      if (tail_only) {
        Eigen::MatrixXd x;
        if (cached.size()) {
          x.resize(cached.rows(), static_cast<Eigen::Index>(batch.size()));
          for (std::size_t k = start; k < end; ++k) {
            x.col(static_cast<Eigen::Index>(k - start)) = cached.col(static_cast<Eigen::Index>(order[k]));
          }
        } else {
          const auto t0 = Clock::now();
          x = prefix_forward(net, batch, first_dense, cfg.threads);
          report.feature_seconds += seconds_since(t0);
        }
        loss = dense_pass(net, first_dense, x, labels, &grads, nullptr);
      } else {
        loss = loss_and_gradient(net, batch, &grads, cfg.threads);
      }
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kDivergedLoss,
                    "loss is " + std::to_string(loss) + " at epoch " + std::to_string(epoch) +
                        ", batch starting at " + std::to_string(start) + " (learning rate " +
                        std::to_string(cfg.learning_rate) + ")");
      }
      ++step;
      for (std::size_t i = 0; i < refs.size(); ++i) {
        optimizer_step<double>(refs[i].param, refs[i].grad, m[i], v[i], cfg, step);
      }
      epoch_loss += loss * static_cast<double>(end - start);
    }
    for (const ParamRef& r : refs) {
      if (!all_finite(r.param)) {
        throw Error(ErrorCode::kDivergedLoss,
                    "parameters became non-finite during epoch " + std::to_string(epoch));
      }
    }
    report.loss_curve.push_back(epoch_loss / static_cast<double>(n));
  }
  report.epochs_run = cfg.epochs;
}

std::vector<Tensor4> to_tensors(std::span<const LabeledGrid> data) {
  std::vector<Tensor4> t;
  t.reserve(data.size());
  for (const LabeledGrid& g : data) t.push_back(from_occupancy(g.grid));
  return t;
}

std::vector<Example> to_examples(const std::vector<Tensor4>& tensors,
                                 std::span<const LabeledGrid> data) {
  std::vector<Example> ex;
  ex.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) ex.push_back({&tensors[i], data[i].label});
  return ex;
}

void check_dataset(std::span<const LabeledGrid> data, const std::vector<std::string>& labels) {
  if (labels.empty()) throw Error(ErrorCode::kInvalidArgument, "label vocabulary is empty");
  std::vector<int> per_class(labels.size(), 0);
  for (const LabeledGrid& g : data) {
    if (g.label < 0 || g.label >= static_cast<int>(labels.size())) {
      throw Error(ErrorCode::kInvalidArgument,
                  "label " + std::to_string(g.label) + " outside the vocabulary");
    }
    ++per_class[static_cast<std::size_t>(g.label)];
  }
  for (std::size_t c = 0; c < labels.size(); ++c) {
    if (per_class[c] == 0) {
      throw Error(ErrorCode::kEmptyClass, "class '" + labels[c] + "' has no training example");
    }
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be positive");
  }
  if (epochs < 0) throw Error(ErrorCode::kInvalidArgument, "epochs must be >= 0");
  if (batch_size < 1) throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  if (!(weight_init_scale >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "weight_init_scale must be >= 0");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "momentum must be in [0, 1)");
  }
}

Network network_view(ClassifierModel& model) {
  Network net;
  switch (model.kind) {
    case NetworkKind::kFG:
      return fg_pretrain_view(model.fg);
    case NetworkKind::kFGOL:
      net.convs = {&model.fg.conv1, &model.fg.conv2};
      net.denses = {&model.fg.fc1, &model.head.dense};
      net.frozen_layers = 3;
      break;
    case NetworkKind::kOLE2E:
      net.convs = {&model.ole2e.conv};
      net.denses = {&model.ole2e.fc1, &model.ole2e.fc2};
      break;
  }
  return net;
}

Network fg_pretrain_view(FGModel& fg) {
  Network net;
  net.convs = {&fg.conv1, &fg.conv2};
  net.denses = {&fg.fc1, &fg.fc_head};
  return net;
}

Gradients Gradients::zeros_like(const Network& net) {
  Gradients g;
  const std::size_t c_count = net.convs.size();
  g.conv_weights.resize(c_count);
  g.conv_bias.resize(c_count);
  for (std::size_t c = 0; c < c_count; ++c) {
    if (!net.trainable(c)) continue;
    g.conv_weights[c].assign(net.convs[c]->weights.size(), 0.0);
    g.conv_bias[c].assign(net.convs[c]->bias.size(), 0.0);
  }
  g.dense_weights.resize(net.denses.size());
  g.dense_bias.resize(net.denses.size());
  for (std::size_t l = 0; l < net.denses.size(); ++l) {
    if (!net.trainable(c_count + l)) continue;
    const DenseLayer& d = *net.denses[l];
    g.dense_weights[l] = Eigen::MatrixXd::Zero(d.out_dim, d.in_dim);
    g.dense_bias[l] = Eigen::VectorXd::Zero(d.out_dim);
  }
  return g;
}

double loss_and_gradient(const Network& net, std::span<const Example> batch, Gradients* grads,
                         int threads) {
  check_network(net);
  if (batch.empty()) throw Error(ErrorCode::kInvalidArgument, "empty batch");
  check_labels(net, batch);
  if (grads && grads->dense_weights.size() != net.denses.size()) *grads = Gradients::zeros_like(net);
  std::vector<int> labels;
  for (const Example& e : batch) labels.push_back(e.label);

  const std::size_t c_count = net.convs.size();
  const bool convs_train = grads && net.frozen_layers < c_count;
  if (!convs_train) {
    const std::size_t first = std::min(net.frozen_layers > c_count ? net.frozen_layers - c_count : 0,
                                       net.denses.size() - 1);
    const Eigen::MatrixXd x = prefix_forward(net, batch, first, threads);
    return dense_pass(net, first, x, labels, grads, nullptr);
  }

  std::vector<std::vector<Tensor4>> acts;
  const Eigen::MatrixXd x = conv_stage(net, batch, threads, &acts);
  Eigen::MatrixXd grad_x(x.rows(), x.cols());
  const double loss = dense_pass(net, 0, x, labels, grads, &grad_x);

  // Per-example buffers summed in example order keep the result independent
  // of the thread count.
  std::vector<ConvGrad> per_example(batch.size());
  detail::parallel_for(batch.size(), threads, [&](std::size_t e) {
    ConvGrad& cg = per_example[e];
    cg.w.resize(c_count);
    cg.b.resize(c_count);
    const Tensor4& top = acts[e].back();
    Tensor4 g(top.channels, top.x, top.y, top.z);
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.data[i] = top.data[i] > 0.0 ? grad_x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e)) : 0.0;
    }
    for (std::size_t c = c_count; c-- > net.frozen_layers;) {
      const Conv3DLayer& layer = *net.convs[c];
      cg.w[c].assign(layer.weights.size(), 0.0);
      cg.b[c].assign(layer.bias.size(), 0.0);
      const Tensor4& in = c == 0 ? *batch[e].input : acts[e][c - 1];
      const bool need_input = c > net.frozen_layers;
      Tensor4 gin;
      conv3d_backward(layer, in, g, cg.w[c], cg.b[c], need_input ? &gin : nullptr);
      if (!need_input) break;
      for (std::size_t i = 0; i < gin.size(); ++i) {
        if (!(in.data[i] > 0.0)) gin.data[i] = 0.0;
      }
      g = std::move(gin);
    }
  });
  for (std::size_t c = net.frozen_layers; c < c_count; ++c) {
    std::vector<double>& w = grads->conv_weights[c];
    std::vector<double>& b = grads->conv_bias[c];
    std::fill(w.begin(), w.end(), 0.0);
    std::fill(b.begin(), b.end(), 0.0);
    for (const ConvGrad& cg : per_example) {
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += cg.w[c][i];
      for (std::size_t i = 0; i < b.size(); ++i) b[i] += cg.b[c][i];
    }
  }
  return loss;
}

Eigen::MatrixXd network_logits(const Network& net, std::span<const Example> batch, int threads) {
  check_network(net);
  if (batch.empty()) return {};
  const Eigen::MatrixXd x = prefix_forward(net, batch, net.denses.size() - 1, threads);
  return dense_apply(*net.denses.back(), x, false);
}

void initialize(const Network& net, std::uint64_t seed, double scale) {
  Rng rng(seed);
  for (std::size_t c = 0; c < net.convs.size(); ++c) {
    if (net.trainable(c)) initialize(*net.convs[c], rng, scale);
  }
  for (std::size_t l = 0; l < net.denses.size(); ++l) {
    if (net.trainable(net.convs.size() + l)) initialize(*net.denses[l], rng, scale);
  }
}

TrainResult train(NetworkKind kind, std::span<const LabeledGrid> data,
                  std::vector<std::string> labels, const TrainConfig& config,
                  const FGModel* feature_generator) {
  config.validate();
  check_dataset(data, labels);
  if (kind != NetworkKind::kOLE2E && !feature_generator) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(to_string(kind)) + " needs a pretrained feature generator");
  }
  const auto t0 = Clock::now();
  TrainResult result;
  ClassifierModel& model = result.model;
  model.kind = kind;
  model.labels = std::move(labels);
  const std::vector<Tensor4> tensors = to_tensors(data);
  const std::vector<Example> examples = to_examples(tensors, data);

  switch (kind) {
    case NetworkKind::kFG: {
      model.fg = *feature_generator;
      const auto tf = Clock::now();
      model.nn_index.resize(data.size());
      detail::parallel_for(data.size(), config.threads, [&](std::size_t i) {
        model.nn_index[i] = {fg_features(model.fg, tensors[i]), data[i].label};
      });
      result.report.feature_seconds = seconds_since(tf);
      break;
    }
    case NetworkKind::kFGOL: {
      model.fg = *feature_generator;
      model.head.dense = DenseLayer(kFeatureDim, model.class_count());
      const Network net = network_view(model);
      initialize(net, derive_seed(config.rng_seed, "init"), config.weight_init_scale);
      optimize(net, examples, config, result.report);
      break;
    }
    case NetworkKind::kOLE2E: {
      model.ole2e = OLE2EModel::make(model.class_count(), config.ole2e);
      const Network net = network_view(model);
      initialize(net, derive_seed(config.rng_seed, "init"), config.weight_init_scale);
      optimize(net, examples, config, result.report);
      break;
    }
  }
  result.report.wall_seconds = seconds_since(t0);
  result.report.train_accuracy = accuracy(model, data);
  return result;
}

TrainResult pretrain_fg(std::span<const LabeledGrid> corpus, std::vector<std::string> labels,
                        const TrainConfig& config, const FGArchitecture& arch) {
  config.validate();
  check_dataset(corpus, labels);
  const auto t0 = Clock::now();
  TrainResult result;
  ClassifierModel& model = result.model;
  model.kind = NetworkKind::kFG;
  model.labels = std::move(labels);
  model.fg = FGModel::make(model.class_count(), arch);
  const std::vector<Tensor4> tensors = to_tensors(corpus);
  const std::vector<Example> examples = to_examples(tensors, corpus);
  const Network net = fg_pretrain_view(model.fg);
  initialize(net, derive_seed(config.rng_seed, "init"), config.weight_init_scale);
  optimize(net, examples, config, result.report);
  result.report.wall_seconds = seconds_since(t0);

  std::size_t correct = 0;
  for (std::size_t start = 0; start < examples.size(); start += 16) {
    const std::size_t end = std::min(examples.size(), start + 16);
    const std::span<const Example> chunk(examples.data() + start, end - start);
    const Eigen::MatrixXd logits = network_logits(net, chunk, config.threads);
    for (std::size_t e = start; e < end; ++e) {
      const Prediction p = predict_from_logits(logits.col(static_cast<Eigen::Index>(e - start)));
      correct += p.label == examples[e].label;
    }
  }
  result.report.train_accuracy =
      examples.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(examples.size());
  return result;
}

double accuracy(const ClassifierModel& model, std::span<const LabeledGrid> data) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const LabeledGrid& g : data) correct += predict(model, from_occupancy(g.grid)).label == g.label;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace kiip::nn
