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
#include "kiip/io/kvox.hpp"

#include <cmath>
#include <cstdio>

#include "kiip/error.hpp"
#include "kiip/io/file.hpp"
#include "text_scanner.hpp"

namespace kiip::io {

using detail::parse_number;
using detail::TextScanner;
using pipeline::kGridResolution;
using pipeline::kVoxelCount;

std::string format_kvox(const pipeline::VoxelCountGrid& grid) {
  if (!grid.crop.is_cube()) {
    throw Error(ErrorCode::kInvalidArgument, "KVOX requires a cubic crop box");
  }
  const Vec3& m = grid.crop.min_corner;
  char buf[160];
  std::snprintf(buf, sizeof buf, "KVOX 1 %d %d %d %.17g %.17g %.17g %.17g\n", kGridResolution,
                kGridResolution, kGridResolution, m.x(), m.y(), m.z(), grid.crop.extent().x());
  std::string out = buf;
  out.reserve(out.size() + kVoxelCount * 3);
  for (std::size_t i = 0; i < kVoxelCount; ++i) {
    out += std::to_string(grid.counts[i]);
    out += (i + 1) % kGridResolution == 0 ? '\n' : ' ';
  }
  return out;
}

pipeline::VoxelCountGrid parse_kvox(std::string_view text) {
  TextScanner sc(text);
  auto fail = [](const std::string& msg, std::size_t offset) -> void {
    throw Error(ErrorCode::kFormatError, msg, {.byte_offset = offset});
  };
  auto need = [&](const char* what) {
    auto t = sc.next();
    if (!t) fail(std::string("truncated header: missing ") + what, sc.offset());
    return *t;
  };
  const auto magic = need("magic");
  if (magic.text != "KVOX") fail("expected 'KVOX' magic", magic.offset);
  const auto version = need("version");
  if (version.text != "1") fail("unsupported KVOX version '" + std::string(version.text) + "'", version.offset);
  for (const char* axis : {"x dimension", "y dimension", "z dimension"}) {
    const auto t = need(axis);
    const auto d = parse_number<int>(t.text);
    if (!d || *d != kGridResolution) {
      fail(std::string("unsupported ") + axis + " '" + std::string(t.text) + "' (expected 30)",
           t.offset);
    }
  }
  double header[4];
  std::size_t edge_offset = 0;
  const char* names[4] = {"min x", "min y", "min z", "edge"};
  for (int i = 0; i < 4; ++i) {
    const auto t = need(names[i]);
    const auto v = parse_number<double>(t.text);
    if (!v || !std::isfinite(*v)) fail(std::string("bad ") + names[i], t.offset);
    header[i] = *v;
    edge_offset = t.offset;
  }
  if (!(header[3] > 0.0)) fail("edge must be positive", edge_offset);

  pipeline::VoxelCountGrid grid;
  grid.crop.min_corner = Vec3(header[0], header[1], header[2]);
  grid.crop.max_corner = grid.crop.min_corner + Vec3::Constant(header[3]);
  for (std::size_t i = 0; i < kVoxelCount; ++i) {
    const auto t = sc.next();
    if (!t) {
      fail("truncated data: " + std::to_string(i) + " of " + std::to_string(kVoxelCount) +
               " counts",
           sc.offset());
    }
    const auto c = parse_number<std::uint32_t>(t->text);
    if (!c) fail("bad count '" + std::string(t->text) + "'", t->offset);
    grid.counts[i] = *c;
  }
  if (!sc.at_end()) fail("trailing data after 27000 counts", sc.offset());
  return grid;
}

void write_kvox(const pipeline::VoxelCountGrid& grid, const std::filesystem::path& path) {
  write_file_atomic(path, format_kvox(grid));
}

pipeline::VoxelCountGrid read_kvox(const std::filesystem::path& path) {
  return parse_kvox(read_text_file(path));
}

}  // namespace kiip::io
