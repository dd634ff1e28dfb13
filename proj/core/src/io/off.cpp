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
#include "kiip/io/off.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "kiip/error.hpp"
#include "kiip/io/file.hpp"
#include "text_scanner.hpp"

namespace kiip::io {

using detail::parse_number;
using detail::TextScanner;

namespace {

std::vector<TextScanner::Token> line_tokens(TextScanner& sc) {
  std::vector<TextScanner::Token> tokens;
  while (auto t = sc.next_on_line()) tokens.push_back(*t);
  return tokens;
}

// Next non-empty line's tokens, or an empty vector at end of input.
std::vector<TextScanner::Token> next_line(TextScanner& sc) {
  while (!sc.at_end()) {
    auto tokens = line_tokens(sc);
    if (!tokens.empty()) return tokens;
  }
  return {};
}

}  // namespace

TriangleMesh parse_off(std::string_view text) {
  TextScanner sc(text);
  sc.set_hash_comments(true);

  auto header = next_line(sc);
  if (header.empty()) throw Error(ErrorCode::kBadHeader, "empty file", {.line = sc.line()});
  const std::size_t header_line = header.front().line;
  std::string_view magic = header.front().text;
  if (magic.substr(0, 3) != "OFF") {
    throw Error(ErrorCode::kBadHeader, "expected 'OFF', got '" + std::string(magic) + "'",
                {.line = header_line});
  }
  std::vector<std::string_view> count_tokens;
  if (magic.size() > 3) count_tokens.push_back(magic.substr(3));
  for (std::size_t i = 1; i < header.size(); ++i) count_tokens.push_back(header[i].text);
  std::size_t count_line = header_line;
  if (count_tokens.empty()) {
    auto counts = next_line(sc);
    if (counts.empty()) {
      throw Error(ErrorCode::kBadHeader, "missing vertex/face counts", {.line = sc.line()});
    }
    count_line = counts.front().line;
    for (const auto& t : counts) count_tokens.push_back(t.text);
  }
  if (count_tokens.size() < 2) {
    throw Error(ErrorCode::kBadHeader, "expected vertex and face counts", {.line = count_line});
  }
  const auto nv = parse_number<std::uint32_t>(count_tokens[0]);
  const auto nf = parse_number<std::uint32_t>(count_tokens[1]);
  if (!nv || !nf) {
    throw Error(ErrorCode::kBadHeader, "invalid vertex/face counts", {.line = count_line});
  }

  TriangleMesh mesh;
  mesh.vertices.reserve(*nv);
  for (std::uint32_t i = 0; i < *nv; ++i) {
    auto tokens = next_line(sc);
    if (tokens.empty()) {
      throw Error(ErrorCode::kCountMismatch,
                  "file ends after " + std::to_string(i) + " of " + std::to_string(*nv) +
                      " vertices",
                  {.line = sc.line()});
    }
    const std::size_t line = tokens.front().line;
    if (tokens.size() < 3) {
      throw Error(ErrorCode::kFormatError, "vertex needs 3 coordinates", {.line = line});
    }
    Vec3 v;
    for (int a = 0; a < 3; ++a) {
      const auto x = parse_number<double>(tokens[static_cast<std::size_t>(a)].text);
      if (!x || !std::isfinite(*x)) {
        throw Error(ErrorCode::kFormatError,
                    "bad coordinate '" + std::string(tokens[static_cast<std::size_t>(a)].text) + "'",
                    {.line = line});
      }
      v[a] = *x;
    }
    mesh.vertices.push_back(v);
  }

  mesh.faces.reserve(*nf);
  for (std::uint32_t i = 0; i < *nf; ++i) {
    auto tokens = next_line(sc);
    if (tokens.empty()) {
      throw Error(ErrorCode::kCountMismatch,
                  "file ends after " + std::to_string(i) + " of " + std::to_string(*nf) + " faces",
                  {.line = sc.line()});
    }
    const std::size_t line = tokens.front().line;
    const auto n = parse_number<std::uint32_t>(tokens[0].text);
    if (!n || *n < 3) {
      throw Error(ErrorCode::kFormatError, "face needs a vertex count >= 3", {.line = line});
    }
    if (tokens.size() < *n + 1u) {
      throw Error(ErrorCode::kFormatError,
                  "face lists " + std::to_string(tokens.size() - 1) + " of " +
                      std::to_string(*n) + " indices",
                  {.line = line});
    }
    std::vector<std::uint32_t> poly(*n);
    for (std::uint32_t k = 0; k < *n; ++k) {
      const auto idx = parse_number<std::uint32_t>(tokens[k + 1].text);
      if (!idx) {
        throw Error(ErrorCode::kFormatError,
                    "bad vertex index '" + std::string(tokens[k + 1].text) + "'", {.line = line});
      }
      if (*idx >= *nv) {
        throw Error(ErrorCode::kIndexOutOfRange,
                    "vertex index " + std::to_string(*idx) + " with " + std::to_string(*nv) +
                        " vertices",
                    {.line = line});
      }
      poly[k] = *idx;
    }
    for (std::uint32_t k = 1; k + 1 < *n; ++k) mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
  }
  mesh.remove_degenerate_faces();
  return mesh;
}

TriangleMesh read_off_file(const std::filesystem::path& path) {
  return parse_off(read_text_file(path));
}

std::string format_off(const TriangleMesh& mesh) {
  std::string out = "OFF\n" + std::to_string(mesh.vertices.size()) + " " +
                    std::to_string(mesh.faces.size()) + " 0\n";
  char buf[96];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out += buf;
  }
  for (const Face& f : mesh.faces) {
    std::snprintf(buf, sizeof buf, "3 %u %u %u\n", f[0], f[1], f[2]);
    out += buf;
  }
  return out;
}

}  // namespace kiip::io
