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

// Every file under fixtures/malformed must be rejected with a kiip::Error
// that says where the problem is.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kiip/chain_io.hpp"
#include "kiip/error.hpp"
#include "kiip/io/kvox.hpp"
#include "kiip/io/manifest.hpp"
#include "kiip/io/off.hpp"
#include "kiip/io/ply.hpp"
#include "kiip/nn/checkpoint.hpp"

namespace kiip {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void parse_by_name(const std::string& name, const std::string& text) {
  if (ends_with(name, ".off")) {
    io::parse_off(text);
  } else if (ends_with(name, ".ply")) {
    io::parse_ply_mesh(text);
  } else if (ends_with(name, ".kvox")) {
    io::parse_kvox(text);
  } else if (ends_with(name, ".chain.json")) {
    geom::parse_chain_json(text);
  } else if (ends_with(name, ".manifest.json")) {
    io::parse_dataset_manifest(text);
  } else if (ends_with(name, ".kiipnn")) {
    nn::parse_checkpoint(text);
  } else {
    FAIL() << "no parser for " << name;
  }
}

std::vector<fs::path> fixtures() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(fs::path(KIIP_FIXTURE_DIR) / "malformed"))
    out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

TEST(MalformedFixturesTest, AtLeastTwenty) { EXPECT_GE(fixtures().size(), 20u); }

TEST(MalformedFixturesTest, EachGivesPositionedError) {
  for (const fs::path& p : fixtures()) {
    const std::string name = p.filename().string();
    SCOPED_TRACE(name);
    try {
      parse_by_name(name, slurp(p));
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_TRUE(e.position().line.has_value() || e.position().byte_offset.has_value())
          << e.what();
    } catch (const std::exception& e) {
      ADD_FAILURE() << "non-kiip exception: " << e.what();
    }
  }
}

}  // namespace
}  // namespace kiip
