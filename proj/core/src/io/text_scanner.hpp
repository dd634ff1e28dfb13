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

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "kiip/error.hpp"

namespace kiip::io::detail {

// Whitespace-separated token reader that remembers where each token began,
// so errors can point at a line and byte offset.
class TextScanner {
 public:
  explicit TextScanner(std::string_view text) : text_(text) {}

  struct Token {
    std::string_view text;
    std::size_t offset = 0;
    std::size_t line = 1;
  };

  // Next token on any line. Empty optional at end of input.
  std::optional<Token> next() {
    skip_space(true);
    if (pos_ >= text_.size()) return std::nullopt;
    return take();
  }

  // Next token on the current line only.
  std::optional<Token> next_on_line() {
    skip_space(false);
    if (pos_ >= text_.size() || text_[pos_] == '\n') return std::nullopt;
    return take();
  }

  // Remainder of the current line (without the newline), consuming it.
  Token rest_of_line() {
    const std::size_t start = pos_;
    const std::size_t line = line_;
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    Token t{text_.substr(start, pos_ - start), start, line};
    if (pos_ < text_.size()) {
      ++pos_;
      ++line_;
    }
    if (!t.text.empty() && t.text.back() == '\r') t.text.remove_suffix(1);
    return t;
  }

  void skip_line() { rest_of_line(); }

  bool at_end() {
    skip_space(true);
    return pos_ >= text_.size();
  }

  std::size_t offset() const { return pos_; }
  std::size_t line() const { return line_; }

  // Comment handling: '#' to end of line is skipped when enabled.
  void set_hash_comments(bool on) { hash_comments_ = on; }

 private:
  void skip_space(bool cross_lines) {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        if (!cross_lines) return;
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        ++pos_;
      } else if (c == '#' && hash_comments_) {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        return;
      }
    }
  }

  Token take() {
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') break;
      if (c == '#' && hash_comments_) break;
      ++pos_;
    }
    return {text_.substr(start, pos_ - start), start, line_};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  bool hash_comments_ = false;
};

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

}  // namespace kiip::io::detail
