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

#include <gtest/gtest.h>

#include "kiip/error.hpp"
#include "kiip/nn/train.hpp"
#include "oracles.hpp"

namespace kiip::nn {
namespace {

ClassifierModel make_model(NetworkKind kind) {
  ClassifierModel m;
  m.kind = kind;
  m.labels = {"a", "b", "c"};
  Rng rng(static_cast<std::uint64_t>(kind) + 1);
  if (kind == NetworkKind::kOLE2E) {
    m.ole2e = OLE2EModel::make(3);
    initialize(network_view(m), 9, 1.0);
    return m;
  }
  m.fg = FGModel::make(10);
  initialize(fg_pretrain_view(m.fg), 9, 1.0);
  if (kind == NetworkKind::kFGOL) {
    m.head.dense = DenseLayer(kFeatureDim, 3);
    initialize(m.head.dense, rng);
  } else {
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd f(kFeatureDim);
      for (Eigen::Index k = 0; k < f.size(); ++k) f(k) = rng.normal();
      m.nn_index.push_back({f, i % 3});
    }
  }
  return m;
}

Tensor4 probe_input() {
  Tensor4 t(1, kInputSide, kInputSide, kInputSide);
  Rng rng(4);
  for (double& v : t.data) v = rng.below(5) == 0 ? 1.0 : 0.0;
  return t;
}

class CheckpointRoundTrip : public ::testing::TestWithParam<NetworkKind> {};

TEST_P(CheckpointRoundTrip, BitExact) {
  const ClassifierModel m = make_model(GetParam());
  const std::string bytes = serialize_checkpoint(m);
  EXPECT_EQ(bytes.substr(0, 8), std::string("KIIPNN1\0", 8));
  const ClassifierModel back = parse_checkpoint(bytes);
  EXPECT_EQ(back.kind, m.kind);
  EXPECT_EQ(back.labels, m.labels);
  EXPECT_EQ(serialize_checkpoint(back), bytes);
  const Tensor4 x = probe_input();
  const Prediction a = predict(m, x);
  const Prediction b = predict(back, x);
  EXPECT_EQ(a.label, b.label);
  EXPECT_EQ(a.probabilities, b.probabilities);
}

TEST_P(CheckpointRoundTrip, EveryTruncationIsAFormatError) {
  const std::string bytes = serialize_checkpoint(make_model(GetParam()));
  // Every prefix through the descriptor, then a stride through the payload.
  for (std::size_t n = 0; n < bytes.size(); n += n < 2048 ? 1 : 99991) {
    try {
      parse_checkpoint(std::string_view(bytes).substr(0, n));
      FAIL() << "accepted " << n << " bytes";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kFormatError);
      EXPECT_TRUE(e.position().byte_offset.has_value());
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, CheckpointRoundTrip,
                         ::testing::Values(NetworkKind::kFG, NetworkKind::kFGOL,
                                           NetworkKind::kOLE2E),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(CheckpointTest, RejectsTrailingBytes) {
  const std::string bytes = serialize_checkpoint(make_model(NetworkKind::kOLE2E)) + "x";
  EXPECT_THROW(parse_checkpoint(bytes), Error);
}

TEST(CheckpointTest, RejectsWidthMismatch) {
  ClassifierModel m = make_model(NetworkKind::kOLE2E);
  m.labels.push_back("d");  // fc2 still has 3 outputs
  EXPECT_THROW(parse_checkpoint(serialize_checkpoint(m)), Error);
}

TEST(CheckpointTest, FileRoundTrip) {
  const auto dir = testing::scratch_dir("checkpoint");
  const ClassifierModel m = make_model(NetworkKind::kFGOL);
  save_checkpoint(m, dir / "m.kiipnn");
  EXPECT_EQ(serialize_checkpoint(load_checkpoint(dir / "m.kiipnn")), serialize_checkpoint(m));
  EXPECT_THROW(load_checkpoint(dir / "none.kiipnn"), Error);
}

}  // namespace
}  // namespace kiip::nn
