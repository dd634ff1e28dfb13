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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kiip {

enum class ErrorCode {
  kLengthMismatch,
  kDimensionMismatch,
  kWrongFrame,
  kOutOfBounds,
  kShapeMismatch,
  kEmptyClass,
  kDivergedLoss,
  kEmptyTrainingSet,
  kBadHeader,
  kCountMismatch,
  kIndexOutOfRange,
  kFormatError,
  kInvalidArgument,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Where in an input document a parse error was detected. Line numbers are
// 1-based; byte offsets are 0-based.
struct SourcePosition {
  std::optional<std::size_t> line{};
  std::optional<std::size_t> byte_offset{};
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, SourcePosition pos = {});

  ErrorCode code() const noexcept { return code_; }
  const SourcePosition& position() const noexcept { return pos_; }

 private:
  ErrorCode code_;
  SourcePosition pos_;
};

}  // namespace kiip
