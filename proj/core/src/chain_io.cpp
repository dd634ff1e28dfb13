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
#include "kiip/chain_io.hpp"

#include <json.hpp>

#include "kiip/error.hpp"
#include "kiip/io/file.hpp"

namespace kiip::geom {

using nlohmann::json;

namespace {

Vec3 read_vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::kFormatError, std::string(what) + " must be an array of 3 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Mat3 read_mat3(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::kFormatError, "offset_rotation must be a 3x3 row-major array");
  }
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = read_vec3(j[r], "offset_rotation row").transpose();
  return m;
}

}  // namespace

ChainDescription parse_chain_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kFormatError, e.what(), {.byte_offset = e.byte});
  }
  try {
    std::vector<Joint> joints;
    std::vector<double> home;
    for (const json& jj : doc.at("joints")) {
      const std::string kind = jj.at("kind").get<std::string>();
      JointKind k;
      if (kind == "revolute") {
        k = JointKind::kRevolute;
      } else if (kind == "prismatic") {
        k = JointKind::kPrismatic;
      } else {
        throw Error(ErrorCode::kFormatError, "unknown joint kind '" + kind + "'");
      }
      Mat3 rot = Mat3::Identity();
      Vec3 trans = Vec3::Zero();
      if (jj.contains("offset_rotation")) rot = read_mat3(jj["offset_rotation"]);
      if (jj.contains("offset_translation")) {
        trans = read_vec3(jj["offset_translation"], "offset_translation");
      }
      joints.emplace_back(k, read_vec3(jj.at("axis"), "axis"), RigidTransform(rot, trans),
                          jj.value("name", std::string{}));
      const double h = jj.value("home", 0.0);
      home.push_back(k == JointKind::kRevolute ? deg_to_rad(h) : h);
    }
    return {KinematicChain(std::move(joints), doc.at("base").get<std::string>(),
                           doc.at("tip").get<std::string>()),
            JointState{std::move(home)}};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("chain description: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormatError) throw;
    throw Error(ErrorCode::kFormatError, std::string("chain description: ") + e.what());
  }
}

std::string format_chain_json(const ChainDescription& desc) {
  json doc;
  doc["base"] = desc.chain.base_frame();
  doc["tip"] = desc.chain.tip_frame();
  json joints = json::array();
  for (std::size_t i = 0; i < desc.chain.size(); ++i) {
    const Joint& j = desc.chain.joints()[i];
    json jj;
    if (!j.name.empty()) jj["name"] = j.name;
    jj["kind"] = j.kind == JointKind::kRevolute ? "revolute" : "prismatic";
    jj["axis"] = {j.axis.x(), j.axis.y(), j.axis.z()};
    const Mat3& r = j.fixed_offset.rotation();
    jj["offset_rotation"] = {{r(0, 0), r(0, 1), r(0, 2)},
                             {r(1, 0), r(1, 1), r(1, 2)},
                             {r(2, 0), r(2, 1), r(2, 2)}};
    const Vec3& t = j.fixed_offset.translation();
    jj["offset_translation"] = {t.x(), t.y(), t.z()};
    const double h = i < desc.home.values.size() ? desc.home.values[i] : 0.0;
    jj["home"] = j.kind == JointKind::kRevolute ? rad_to_deg(h) : h;
    joints.push_back(std::move(jj));
  }
  doc["joints"] = std::move(joints);
  return doc.dump(2) + "\n";
}

ChainDescription load_chain_file(const std::filesystem::path& path) {
  return parse_chain_json(io::read_text_file(path));
}

void save_chain_file(const ChainDescription& desc, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_chain_json(desc));
}

}  // namespace kiip::geom
