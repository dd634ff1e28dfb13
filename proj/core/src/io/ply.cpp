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
#include "kiip/io/ply.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "kiip/error.hpp"
#include "kiip/io/file.hpp"
#include "text_scanner.hpp"

namespace kiip::io {

using detail::parse_number;
using detail::TextScanner;

namespace {

struct Property {
  std::string name;
  bool is_list = false;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

bool known_scalar_type(std::string_view t) {
  for (std::string_view k : {"char", "uchar", "short", "ushort", "int", "uint", "float", "double",
                             "int8", "uint8", "int16", "uint16", "int32", "uint32", "float32",
                             "float64"}) {
    if (t == k) return true;
  }
  return false;
}

[[noreturn]] void fail(const std::string& msg, std::size_t offset) {
  throw Error(ErrorCode::kFormatError, msg, {.byte_offset = offset});
}

double read_value(TextScanner& sc, const std::string& what) {
  const auto tok = sc.next();
  if (!tok) fail("unexpected end of data reading " + what, sc.offset());
  const auto v = parse_number<double>(tok->text);
  if (!v || !std::isfinite(*v)) {
    fail("bad value '" + std::string(tok->text) + "' for " + what, tok->offset);
  }
  return *v;
}

void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

const std::vector<double>* PlyDocument::extra(std::string_view name) const {
  for (std::size_t i = 0; i < extra_names.size(); ++i) {
    if (extra_names[i] == name) return &extra_values[i];
  }
  return nullptr;
}

PlyDocument parse_ply(std::string_view text) {
  TextScanner sc(text);
  PlyDocument doc;
  auto magic = sc.rest_of_line();
  if (magic.text != "ply") fail("missing 'ply' magic", magic.offset);

  std::vector<Element> elements;
  bool have_format = false;
  for (;;) {
    if (sc.offset() >= text.size()) fail("header ends without end_header", sc.offset());
    const auto line = sc.rest_of_line();
    std::istringstream ls{std::string(line.text)};
    std::string keyword;
    ls >> keyword;
    if (keyword.empty()) continue;
    if (keyword == "end_header") break;
    if (keyword == "comment" || keyword == "obj_info") {
      std::string_view rest = line.text.substr(keyword.size());
      if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
      if (keyword == "comment") doc.comments.emplace_back(rest);
      continue;
    }
    if (keyword == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt != "ascii") fail("only ASCII PLY is supported (got '" + fmt + "')", line.offset);
      if (version != "1.0") fail("unsupported PLY version '" + version + "'", line.offset);
      have_format = true;
      continue;
    }
    if (keyword == "element") {
      Element e;
      std::string count;
      ls >> e.name >> count;
      const auto n = parse_number<std::size_t>(count);
      if (e.name.empty() || !n) fail("malformed element line", line.offset);
      e.count = *n;
      elements.push_back(std::move(e));
      continue;
    }
    if (keyword == "property") {
      if (elements.empty()) fail("property before any element", line.offset);
      std::string type;
      ls >> type;
      Property p;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> p.name;
        if (!known_scalar_type(count_type) || !known_scalar_type(item_type)) {
          fail("unknown list property types", line.offset);
        }
        p.is_list = true;
      } else {
        if (!known_scalar_type(type)) fail("unknown property type '" + type + "'", line.offset);
        ls >> p.name;
      }
      if (p.name.empty()) fail("property without a name", line.offset);
      elements.back().properties.push_back(std::move(p));
      continue;
    }
    fail("unknown header keyword '" + keyword + "'", line.offset);
  }
  if (!have_format) fail("header has no format line", 0);

  for (const Element& e : elements) {
    if (e.name == "vertex") {
      int ix = -1, iy = -1, iz = -1;
      for (std::size_t i = 0; i < e.properties.size(); ++i) {
        const Property& p = e.properties[i];
        if (p.is_list) fail("list properties on vertices are not supported", sc.offset());
        if (p.name == "x") ix = static_cast<int>(i);
        else if (p.name == "y") iy = static_cast<int>(i);
        else if (p.name == "z") iz = static_cast<int>(i);
        else {
          doc.extra_names.push_back(p.name);
          doc.extra_values.emplace_back();
        }
      }
      if (ix < 0 || iy < 0 || iz < 0) fail("vertex element lacks x/y/z", sc.offset());
      doc.vertices.reserve(e.count);
      for (auto& col : doc.extra_values) col.reserve(e.count);
      std::vector<double> row(e.properties.size());
      for (std::size_t v = 0; v < e.count; ++v) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          row[i] = read_value(sc, "vertex " + std::to_string(v) + " " + e.properties[i].name);
        }
        doc.vertices.emplace_back(row[static_cast<std::size_t>(ix)],
                                  row[static_cast<std::size_t>(iy)],
                                  row[static_cast<std::size_t>(iz)]);
        std::size_t extra = 0;
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (static_cast<int>(i) == ix || static_cast<int>(i) == iy || static_cast<int>(i) == iz) {
            continue;
          }
          doc.extra_values[extra++].push_back(row[i]);
        }
      }
      continue;
    }
    const bool is_face = e.name == "face";
    for (std::size_t k = 0; k < e.count; ++k) {
      for (const Property& p : e.properties) {
        if (!p.is_list) {
          read_value(sc, e.name + " property " + p.name);
          continue;
        }
        const auto count_tok = sc.next();
        if (!count_tok) fail("unexpected end of data in " + e.name + " list", sc.offset());
        const auto n = parse_number<std::uint32_t>(count_tok->text);
        if (!n) fail("bad list length '" + std::string(count_tok->text) + "'", count_tok->offset);
        std::vector<std::uint32_t> items;
        for (std::uint32_t i = 0; i < *n; ++i) {
          const auto tok = sc.next();
          if (!tok) fail("unexpected end of data in " + e.name + " list", sc.offset());
          const auto idx = parse_number<std::uint32_t>(tok->text);
          if (!idx) fail("bad list item '" + std::string(tok->text) + "'", tok->offset);
          if (is_face && *idx >= doc.vertices.size()) {
            fail("face index " + std::to_string(*idx) + " out of range", tok->offset);
          }
          items.push_back(*idx);
        }
        if (is_face && (p.name == "vertex_indices" || p.name == "vertex_index")) {
          if (items.size() < 3) fail("face with fewer than 3 vertices", count_tok->offset);
          doc.faces.push_back(std::move(items));
        }
      }
    }
  }
  if (!sc.at_end()) fail("trailing data after last element", sc.offset());
  return doc;
}

std::string format_ply(const PlyDocument& doc) {
  std::string out = "ply\nformat ascii 1.0\n";
  for (const std::string& c : doc.comments) out += "comment " + c + "\n";
  out += "element vertex " + std::to_string(doc.vertices.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  for (const std::string& n : doc.extra_names) out += "property double " + n + "\n";
  if (!doc.faces.empty()) {
    out += "element face " + std::to_string(doc.faces.size()) + "\n";
    out += "property list uchar int vertex_indices\n";
  }
  out += "end_header\n";
  for (std::size_t v = 0; v < doc.vertices.size(); ++v) {
    for (int a = 0; a < 3; ++a) {
      if (a) out += ' ';
      append_number(out, doc.vertices[v][a]);
    }
    for (const auto& col : doc.extra_values) {
      out += ' ';
      append_number(out, col[v]);
    }
    out += '\n';
  }
  for (const auto& f : doc.faces) {
    out += std::to_string(f.size());
    for (std::uint32_t i : f) out += " " + std::to_string(i);
    out += '\n';
  }
  return out;
}

std::string format_ply_mesh(const TriangleMesh& mesh) {
  PlyDocument doc;
  doc.vertices = mesh.vertices;
  for (const Face& f : mesh.faces) doc.faces.push_back({f[0], f[1], f[2]});
  return format_ply(doc);
}

TriangleMesh parse_ply_mesh(std::string_view text) {
  PlyDocument doc = parse_ply(text);
  TriangleMesh mesh;
  mesh.vertices = std::move(doc.vertices);
  for (const auto& poly : doc.faces) {
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
  }
  mesh.remove_degenerate_faces();
  return mesh;
}

std::string format_ply_cloud(const sensor::OrganizedPointCloud& cloud) {
  PlyDocument doc;
  doc.comments.push_back("frame_name " + cloud.frame_name);
  doc.comments.push_back("organized " + std::to_string(cloud.width) + " " +
                         std::to_string(cloud.height) + " valid-packed row-major");
  doc.extra_names = {"pixel", "source"};
  doc.extra_values.resize(2);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!cloud.is_valid(i)) continue;
    doc.vertices.push_back(cloud.points[i]);
    doc.extra_values[0].push_back(static_cast<double>(i));
    doc.extra_values[1].push_back(static_cast<double>(cloud.source[i]));
  }
  return format_ply(doc);
}

sensor::OrganizedPointCloud parse_ply_cloud(std::string_view text) {
  const PlyDocument doc = parse_ply(text);
  std::string frame;
  int width = -1, height = -1;
  for (const std::string& c : doc.comments) {
    std::istringstream cs(c);
    std::string key;
    cs >> key;
    if (key == "frame_name") {
      cs >> frame;
    } else if (key == "organized") {
      cs >> width >> height;
    }
  }
  if (width < 1 || height < 1) fail("cloud lacks an 'organized W H' comment", 0);
  const auto* pixel = doc.extra("pixel");
  if (!pixel) fail("cloud lacks a pixel property", 0);
  const auto* source = doc.extra("source");
  auto cloud = sensor::OrganizedPointCloud::empty(width, height, frame);
  for (std::size_t v = 0; v < doc.vertices.size(); ++v) {
    const double p = (*pixel)[v];
    if (!(p >= 0.0) || p >= static_cast<double>(cloud.size()) || p != std::floor(p)) {
      fail("pixel index " + std::to_string(p) + " outside the lattice", 0);
    }
    const auto i = static_cast<std::size_t>(p);
    cloud.points[i] = doc.vertices[v];
    cloud.valid[i] = 1;
    cloud.source[i] = source ? static_cast<std::int32_t>((*source)[v]) : sensor::kNoSource;
  }
  return cloud;
}

std::string format_ply_points(std::span<const Vec3> points, std::span<const std::string> comments) {
  PlyDocument doc;
  doc.comments.assign(comments.begin(), comments.end());
  doc.vertices.assign(points.begin(), points.end());
  return format_ply(doc);
}

PlyDocument read_ply_file(const std::filesystem::path& path) {
  return parse_ply(read_text_file(path));
}

}  // namespace kiip::io
