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

// Runs the kiip executable end to end and checks exit codes and outputs.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>

#include "kiip/io/file.hpp"
#include "kiip/io/kvox.hpp"
#include "kiip/io/manifest.hpp"
#include "kiip/io/off.hpp"
#include "kiip/io/ply.hpp"
#include "oracles.hpp"

namespace kiip {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string output;  // stdout and stderr
};

CliRun kiip(const std::string& args) {
  const std::string cmd = std::string(KIIP_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) r.output.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    io::write_file_atomic(dir_ / "ball.off", io::format_off(make_icosphere(0.03, 3)));
    io::write_file_atomic(dir_ / "brick.off", io::format_off(make_box({0.06, 0.04, 0.03})));
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(kiip("").code, 2);
  EXPECT_EQ(kiip("frobnicate").code, 2);
  EXPECT_EQ(kiip("scan").code, 2);
  EXPECT_EQ(kiip("scan --mesh " + path("ball.off") + " --views 21").code, 2);
  EXPECT_EQ(kiip("--help").code, 0);
  EXPECT_EQ(kiip("scan --help").code, 0);
}

TEST_F(CliTest, MissingMeshNamesPath) {
  const CliRun r = kiip("scan --mesh " + path("no_such_mesh.off") + " --out " + path("x.kvox"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("no_such_mesh.off"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(dir_ / "x.kvox"));
}

TEST_F(CliTest, MalformedMeshIsParseError) {
  io::write_file_atomic(dir_ / "bad.off", "OFF\n3 1 0\n0 0 0\n");
  const CliRun r = kiip("scan --mesh " + path("bad.off"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("bad.off"), std::string::npos) << r.output;
}

TEST_F(CliTest, ZeroViewsGivesEmptyGrid) {
  const CliRun r = kiip("scan --mesh " + path("ball.off") + " --views 0 --out " + path("e.kvox"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(io::read_kvox(dir_ / "e.kvox").total(), 0u);
  EXPECT_TRUE(fs::exists(dir_ / "e.manifest.json"));
}

TEST_F(CliTest, ScanWritesGridManifestAndChains) {
  const CliRun r = kiip("scan --mesh " + path("brick.off") + " --out " + path("s.kvox") +
                     " --manifest " + path("s.json") + " --save-chains " + path("chains") +
                     " --noise-sigma 0 --outlier-prob 0");
  ASSERT_EQ(r.code, 0) << r.output;
  const auto grid = io::read_kvox(dir_ / "s.kvox");
  EXPECT_GT(pipeline::threshold(grid).occupied_count(), 200u);
  EXPECT_NE(io::read_text_file(dir_ / "s.json").find("views"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "chains"));
  // A scan with the saved chains passed back in must reproduce the grid.
  std::string arm, head;
  for (const auto& e : fs::directory_iterator(dir_ / "chains")) {
    const std::string n = e.path().filename().string();
    if (n.find("arm") != std::string::npos) arm = e.path().string();
    if (n.find("head") != std::string::npos) head = e.path().string();
  }
  ASSERT_FALSE(arm.empty());
  ASSERT_FALSE(head.empty());
  const CliRun again = kiip("scan --mesh " + path("brick.off") + " --out " + path("t.kvox") +
                         " --arm " + arm + " --head " + head +
                         " --noise-sigma 0 --outlier-prob 0");
  ASSERT_EQ(again.code, 0) << again.output;
  EXPECT_EQ(io::read_kvox(dir_ / "t.kvox").counts, grid.counts);
}

TEST_F(CliTest, ExportFullAndEmptyGrids) {
  pipeline::VoxelCountGrid full;
  full.crop = pipeline::CropBox{};
  for (auto& c : full.counts) c = 4;
  io::write_kvox(full, dir_ / "full.kvox");
  io::write_kvox(pipeline::VoxelCountGrid{}, dir_ / "empty.kvox");
  ASSERT_EQ(kiip("export --grid " + path("full.kvox") + " --out " + path("full")).code, 0);
  ASSERT_EQ(kiip("export --grid " + path("empty.kvox") + " --out " + path("empty")).code, 0);
  EXPECT_EQ(io::read_ply_file(dir_ / "full.ply").vertices.size(), pipeline::kVoxelCount);
  EXPECT_EQ(io::read_ply_file(dir_ / "empty.ply").vertices.size(), 0u);
  const std::string slices = io::read_text_file(dir_ / "full.slices.txt");
  EXPECT_EQ(std::count(slices.begin(), slices.end(), '#'), 27000);
  EXPECT_EQ(kiip("export --grid " + path("full.kvox") + " --threshold 5 --out " + path("f5")).code, 0);
  EXPECT_EQ(io::read_ply_file(dir_ / "f5.ply").vertices.size(), 0u);
}

TEST_F(CliTest, VoxelizeTrainPredict) {
  io::DatasetManifest m;
  m.labels = {"ball", "brick"};
  m.threshold = 1;
  for (int i = 0; i < 2; ++i) {
    const std::string mesh = i == 0 ? "ball.off" : "brick.off";
    for (const char* mode : {"surface", "solid"}) {
      const std::string out = std::to_string(i) + mode + ".kvox";
      ASSERT_EQ(kiip("voxelize --mesh " + path(mesh) + " --mode " + mode + " --out " + path(out)).code, 0);
      m.entries.push_back({out, i, mesh, 0});
    }
  }
  io::save_dataset_manifest(m, dir_ / "data.json");
  const CliRun t = kiip("train --manifest " + path("data.json") + " --network ol_e2e --epochs 20 --out " +
                     path("m.kiipnn") + " --report " + path("report.json"));
  ASSERT_EQ(t.code, 0) << t.output;
  EXPECT_TRUE(fs::exists(dir_ / "report.json"));
  const CliRun p = kiip("predict --model " + path("m.kiipnn") + " --manifest " + path("data.json"));
  ASSERT_EQ(p.code, 0) << p.output;
  EXPECT_NE(p.output.find("accuracy"), std::string::npos) << p.output;
  const CliRun bad = kiip("predict --model " + path("data.json") + " --grid " + path("0solid.kvox"));
  EXPECT_EQ(bad.code, 2) << bad.output;
}

TEST_F(CliTest, FgNeedsFeatureGenerator) {
  io::DatasetManifest m;
  m.labels = {"ball"};
  m.threshold = 1;
  ASSERT_EQ(kiip("voxelize --mesh " + path("ball.off") + " --out " + path("b.kvox")).code, 0);
  m.entries.push_back({"b.kvox", 0, "ball", 0});
  io::save_dataset_manifest(m, dir_ / "d.json");
  EXPECT_EQ(kiip("train --manifest " + path("d.json") + " --network fg_ol").code, 2);
}

}  // namespace
}  // namespace kiip
