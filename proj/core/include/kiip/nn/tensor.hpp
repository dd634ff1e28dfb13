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

#include <cstddef>
#include <vector>

#include "kiip/pipeline.hpp"

namespace kiip::nn {

// Dense (channels, x, y, z) array; element (c, i, j, k) lives at
// ((c * x + i) * y + j) * z + k.
struct Tensor4 {
  int channels = 0;
  int x = 0;
  int y = 0;
  int z = 0;
  std::vector<double> data;

  Tensor4() = default;
  Tensor4(int channels, int x, int y, int z);

  std::size_t spatial() const { return static_cast<std::size_t>(x) * y * z; }
  std::size_t size() const { return data.size(); }
  std::size_t offset(int c, int i, int j, int k) const {
    return ((static_cast<std::size_t>(c) * x + i) * y + j) * z + k;
  }
  double& at(int c, int i, int j, int k) { return data[offset(c, i, j, k)]; }
  double at(int c, int i, int j, int k) const { return data[offset(c, i, j, k)]; }

  bool all_finite() const;
  bool same_shape(const Tensor4& o) const {
    return channels == o.channels && x == o.x && y == o.y && z == o.z;
  }
};

// Single-channel 30^3 tensor holding the occupancy as {0, 1}.
Tensor4 from_occupancy(const pipeline::OccupancyGrid& grid);

}  // namespace kiip::nn
