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
#include "kiip/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <type_traits>
#include <json.hpp>

#include "kiip/error.hpp"
#include "kiip/io/file.hpp"

namespace kiip::nn {

namespace {

using nlohmann::json;

constexpr std::string_view kMagic{"KIIPNN1\0", 8};

[[noreturn]] void fail(std::size_t offset, const std::string& msg) {
  throw Error(ErrorCode::kFormatError, "checkpoint: " + msg, SourcePosition{.byte_offset = offset});
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(std::string_view bytes, std::size_t& pos) {
  if (bytes.size() - pos < 8) fail(pos, "truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  pos += 8;
  return v;
}

// A named view of one layer's parameters, in serialization order.
template <typename Model>
struct LayerSlot {
  using Conv = std::conditional_t<std::is_const_v<Model>, const Conv3DLayer, Conv3DLayer>;
  using Dense = std::conditional_t<std::is_const_v<Model>, const DenseLayer, DenseLayer>;
  std::string name;
  Conv* conv = nullptr;
  Dense* dense = nullptr;
};

template <typename Model>
std::vector<LayerSlot<Model>> slots(Model& m) {
  switch (m.kind) {
    case NetworkKind::kFG:
      return {{"conv1", &m.fg.conv1, nullptr}, {"conv2", &m.fg.conv2, nullptr},
              {"fc1", nullptr, &m.fg.fc1}, {"fc_head", nullptr, &m.fg.fc_head}};
    case NetworkKind::kFGOL:
      return {{"conv1", &m.fg.conv1, nullptr}, {"conv2", &m.fg.conv2, nullptr},
              {"fc1", nullptr, &m.fg.fc1}, {"fc_head", nullptr, &m.fg.fc_head},
              {"head", nullptr, &m.head.dense}};
    case NetworkKind::kOLE2E:
      return {{"conv", &m.ole2e.conv, nullptr}, {"fc1", nullptr, &m.ole2e.fc1},
              {"fc2", nullptr, &m.ole2e.fc2}};
  }
  return {};
}

template <typename Model>
std::size_t param_count(const LayerSlot<Model>& s) {
  if (s.conv) return s.conv->weights.size() + s.conv->bias.size();
  return static_cast<std::size_t>(s.dense->weights.size() + s.dense->bias.size());
}

}  // namespace

std::string serialize_checkpoint(const ClassifierModel& model) {
  json desc;
  desc["kind"] = std::string(to_string(model.kind));
  desc["labels"] = model.labels;
  desc["input_side"] = model.input_side();
  json layers = json::array();
  std::size_t count = 0;
  const auto ls = slots(model);
  for (const auto& s : ls) {
    if (s.conv) {
      layers.push_back({{"name", s.name}, {"type", "conv3d"}, {"in_channels", s.conv->in_channels},
                        {"filters", s.conv->filters}, {"kernel", s.conv->kernel},
                        {"stride", s.conv->stride}});
    } else {
      layers.push_back({{"name", s.name}, {"type", "dense"}, {"in", s.dense->in_dim},
                        {"out", s.dense->out_dim}});
    }
    count += param_count(s);
  }
  desc["layers"] = layers;
  json nn_labels = json::array();
  for (const FeatureEntry& e : model.nn_index) {
    nn_labels.push_back(e.label);
    count += static_cast<std::size_t>(e.feature.size());
  }
  desc["nn_labels"] = nn_labels;
  desc["feature_dim"] = kFeatureDim;

  const std::string text = desc.dump();
  std::string out(kMagic);
  put_u64(out, text.size());
  out += text;
  put_u64(out, count);
  out.reserve(out.size() + 8 * count);
  auto put = [&](double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); };
  for (const auto& s : ls) {
    if (s.conv) {
      for (double v : s.conv->weights) put(v);
      for (double v : s.conv->bias) put(v);
    } else {
      for (int r = 0; r < s.dense->out_dim; ++r) {
        for (int c = 0; c < s.dense->in_dim; ++c) put(s.dense->weights(r, c));
      }
      for (int r = 0; r < s.dense->out_dim; ++r) put(s.dense->bias[r]);
    }
  }
  for (const FeatureEntry& e : model.nn_index) {
    for (Eigen::Index i = 0; i < e.feature.size(); ++i) put(e.feature[i]);
  }
  return out;
}

ClassifierModel parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    fail(0, "missing KIIPNN1 magic");
  }
  std::size_t pos = kMagic.size();
  const std::uint64_t desc_len = get_u64(bytes, pos);
  if (desc_len > bytes.size() - pos) fail(pos, "descriptor length exceeds file size");
  const std::size_t desc_pos = pos;
  json desc;
  try {
    desc = json::parse(bytes.substr(pos, desc_len));
  } catch (const json::exception& e) {
    fail(desc_pos, std::string("descriptor is not valid JSON: ") + e.what());
  }
  pos += desc_len;

  ClassifierModel model;
  try {
    model.kind = parse_network_kind(desc.at("kind").get<std::string>());
    model.labels = desc.at("labels").get<std::vector<std::string>>();
    const int side = desc.at("input_side").get<int>();
    if (side < 1) fail(desc_pos, "input_side must be positive");
    model.fg.input_side = side;
    model.ole2e.input_side = side;
    const json& layers = desc.at("layers");
    auto ls = slots(model);
    if (!layers.is_array() || layers.size() != ls.size()) {
      fail(desc_pos, "expected " + std::to_string(ls.size()) + " layers for " +
                         std::string(to_string(model.kind)));
    }
    // Each layer's input must match the previous layer's output.
    int channels = 1;
    int spatial = side;
    std::size_t flat = 0;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      const json& l = layers[i];
      if (l.at("name").get<std::string>() != ls[i].name) {
        fail(desc_pos, "layer " + std::to_string(i) + " should be '" + ls[i].name + "'");
      }
      if (ls[i].conv) {
        if (l.at("type").get<std::string>() != "conv3d") fail(desc_pos, ls[i].name + " must be conv3d");
        *ls[i].conv = Conv3DLayer(l.at("in_channels").get<int>(), l.at("filters").get<int>(),
                                  l.at("kernel").get<int>(), l.at("stride").get<int>());
        if (ls[i].conv->in_channels != channels) fail(desc_pos, ls[i].name + " channel mismatch");
        spatial = ls[i].conv->output_size(spatial);
        channels = ls[i].conv->filters;
        flat = static_cast<std::size_t>(channels) * spatial * spatial * spatial;
      } else {
        if (l.at("type").get<std::string>() != "dense") fail(desc_pos, ls[i].name + " must be dense");
        *ls[i].dense = DenseLayer(l.at("in").get<int>(), l.at("out").get<int>());
        const bool head = ls[i].name == "head";
        const std::size_t expected_in = head ? kFeatureDim : flat;
        if (static_cast<std::size_t>(ls[i].dense->in_dim) != expected_in) {
          fail(desc_pos, ls[i].name + " input width " + std::to_string(ls[i].dense->in_dim) +
                             " does not match " + std::to_string(expected_in));
        }
        if (!head) flat = static_cast<std::size_t>(ls[i].dense->out_dim);
      }
    }
    const int classes = model.class_count();
    if (model.kind != NetworkKind::kFG) {
      if (model.kind == NetworkKind::kFGOL && model.fg.fc1.out_dim != kFeatureDim) {
        fail(desc_pos, "fc1 must produce 128 features");
      }
      const DenseLayer& out = model.kind == NetworkKind::kFGOL ? model.head.dense : model.ole2e.fc2;
      if (out.out_dim != classes) fail(desc_pos, "output width does not match label count");
    } else if (model.fg.fc1.out_dim != kFeatureDim) {
      fail(desc_pos, "fc1 must produce 128 features");
    }
    if (model.kind == NetworkKind::kFGOL && model.fg.fc_head.in_dim != kFeatureDim) {
      fail(desc_pos, "fc_head must read 128 features");
    }
    std::size_t expected = 0;
    for (const auto& s : ls) expected += param_count(s);
    const std::vector<int> nn_labels = desc.value("nn_labels", std::vector<int>{});
    for (int lab : nn_labels) {
      if (lab < 0 || lab >= classes) fail(desc_pos, "nearest-neighbor label out of range");
    }
    expected += nn_labels.size() * kFeatureDim;

    const std::size_t count_pos = pos;
    const std::uint64_t count = get_u64(bytes, pos);
    if (count != expected) {
      fail(count_pos, "parameter count " + std::to_string(count) + " but the architecture needs " +
                          std::to_string(expected));
    }
    if ((bytes.size() - pos) / 8 < count) fail(pos, "truncated parameter array");
    if (bytes.size() - pos != count * 8) fail(pos + count * 8, "trailing bytes after parameters");
    auto get = [&] { return std::bit_cast<double>(get_u64(bytes, pos)); };
    for (const auto& s : ls) {
      if (s.conv) {
        for (double& v : s.conv->weights) v = get();
        for (double& v : s.conv->bias) v = get();
      } else {
        for (int r = 0; r < s.dense->out_dim; ++r) {
          for (int c = 0; c < s.dense->in_dim; ++c) s.dense->weights(r, c) = get();
        }
        for (int r = 0; r < s.dense->out_dim; ++r) s.dense->bias[r] = get();
      }
    }
    for (int lab : nn_labels) {
      FeatureEntry e{Eigen::VectorXd(kFeatureDim), lab};
      for (int i = 0; i < kFeatureDim; ++i) e.feature[i] = get();
      model.nn_index.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    fail(desc_pos, std::string("bad descriptor: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormatError) throw;
    fail(desc_pos, e.what());
  }
  return model;
}

void save_checkpoint(const ClassifierModel& model, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize_checkpoint(model));
}

ClassifierModel load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(io::read_text_file(path));
}

}  // namespace kiip::nn
