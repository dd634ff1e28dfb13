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
#include "kiip/nn/tensor.hpp"

#include <cmath>

namespace kiip::nn {

Tensor4::Tensor4(int c, int xs, int ys, int zs)
    : channels(c), x(xs), y(ys), z(zs),
      data(static_cast<std::size_t>(c) * xs * ys * zs, 0.0) {}

bool Tensor4::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor4 from_occupancy(const pipeline::OccupancyGrid& grid) {
  const int r = pipeline::kGridResolution;
  Tensor4 t(1, r, r, r);
  // Both layouts are x-major, so the linear indices coincide.
  for (std::size_t i = 0; i < pipeline::kVoxelCount; ++i) t.data[i] = grid.occupied[i] ? 1.0 : 0.0;
  return t;
}

}  // namespace kiip::nn
