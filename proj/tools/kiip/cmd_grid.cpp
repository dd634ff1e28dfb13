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
#include <iostream>
#include <memory>

#include "common.hpp"
#include "kiip/io/file.hpp"
#include "kiip/io/kvox.hpp"
#include "kiip/io/mesh_file.hpp"
#include "kiip/io/ply.hpp"
#include "kiip/io/voxelize.hpp"

namespace kiip::cli {

namespace {

struct ExportOptions {
  std::string grid;
  std::string out;
  std::uint32_t threshold = pipeline::kDefaultMinCount;
};

// One block per z layer, y rows top to bottom, x across; '#' occupied.
std::string slice_raster(const pipeline::OccupancyGrid& g) {
  const int r = pipeline::kGridResolution;
  std::string out;
  for (int z = 0; z < r; ++z) {
    out += "z " + std::to_string(z) + "\n";
    for (int y = r - 1; y >= 0; --y) {
      for (int x = 0; x < r; ++x) out += g.at(x, y, z) ? '#' : '.';
      out += '\n';
    }
  }
  return out;
}

void run_export(const ExportOptions& o) {
  const pipeline::VoxelCountGrid counts = load_input(o.grid, [](const auto& p) { return io::read_kvox(p); });
  const pipeline::OccupancyGrid occ = pipeline::threshold(counts, o.threshold);
  std::vector<Vec3> centers;
  const int r = pipeline::kGridResolution;
  for (int x = 0; x < r; ++x) {
    for (int y = 0; y < r; ++y) {
      for (int z = 0; z < r; ++z) {
        if (occ.at(x, y, z)) centers.push_back(pipeline::voxel_center(occ.crop, {x, y, z}));
      }
    }
  }
  std::filesystem::path prefix =
      o.out.empty() ? std::filesystem::path(o.grid).replace_extension() : std::filesystem::path(o.out);
  const std::vector<std::string> comments = {"occupied voxel centers, gripper frame",
                                             "threshold " + std::to_string(o.threshold)};
  std::filesystem::path ply = prefix;
  ply += ".ply";
  std::filesystem::path txt = prefix;
  txt += ".slices.txt";
  io::write_file_atomic(ply, io::format_ply_points(centers, comments));
  io::write_file_atomic(txt, slice_raster(occ));
  std::cout << centers.size() << " occupied voxels -> " << ply.string() << ", " << txt.string() << "\n";
}

struct VoxelizeOptions {
  std::string mesh;
  std::string out = "mesh.kvox";
  std::string mode = "surface";
  bool no_normalize = false;
  double margin = 0.1;
};

void run_voxelize(const VoxelizeOptions& o) {
  TriangleMesh mesh = load_input(o.mesh, [](const auto& p) { return io::read_mesh_file(p); });
  mesh.remove_degenerate_faces();
  const pipeline::CropBox box;
  if (!o.no_normalize) mesh = io::normalize_to_box(mesh, box, o.margin);
  const io::MeshVoxelization v =
      io::voxelize_mesh(mesh, box, o.mode == "solid" ? io::VoxelMode::kSolid : io::VoxelMode::kSurface);
  io::write_kvox(v.to_counts(), o.out);
  std::cout << v.occupied_count() << " voxels (" << o.mode << ") -> " << o.out << "\n";
}

}  // namespace

void add_export_command(CLI::App& app) {
  auto opt = std::make_shared<ExportOptions>();
  CLI::App* cmd = app.add_subcommand("export", "Write occupied voxel centers as PLY plus a slice raster");
  cmd->add_option("--grid", opt->grid, "KVOX grid")->required();
  cmd->add_option("--out", opt->out, "Output prefix (default: grid path without extension)");
  cmd->add_option("--threshold", opt->threshold, "Minimum count for an occupied voxel")->capture_default_str();
  cmd->callback([opt] { run_export(*opt); });
}

void add_voxelize_command(CLI::App& app) {
  auto opt = std::make_shared<VoxelizeOptions>();
  CLI::App* cmd = app.add_subcommand("voxelize", "Voxelize a mesh directly into a KVOX grid (count 1 per voxel)");
  cmd->add_option("--mesh", opt->mesh, "Mesh (OFF or ASCII PLY)")->required();
  cmd->add_option("--out", opt->out, "Output KVOX grid")->capture_default_str();
  cmd->add_option("--mode", opt->mode, "surface or solid")
      ->check(CLI::IsMember({"surface", "solid"}))->capture_default_str();
  cmd->add_flag("--no-normalize", opt->no_normalize, "Keep mesh coordinates (meters, gripper frame)");
  cmd->add_option("--margin", opt->margin, "Margin fraction when normalizing")->capture_default_str();
  cmd->callback([opt] { run_voxelize(*opt); });
}

}  // namespace kiip::cli
