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

#include <CLI11.hpp>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>

#include "kiip/error.hpp"

namespace kiip::cli {

// Bad invocation or unreadable/malformed input: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs a loader over a user-supplied input file; failures become UsageError
// with the offending path in the message.
template <typename Fn>
auto load_input(const std::filesystem::path& path, Fn&& fn) {
  if (!std::filesystem::exists(path)) throw UsageError("no such file: '" + path.string() + "'");
  try {
    return fn(path);
  } catch (const Error& e) {
    throw UsageError("'" + path.string() + "': " + e.what());
  }
}

void add_scan_command(CLI::App& app);
void add_experiment_command(CLI::App& app);
void add_train_command(CLI::App& app);
void add_predict_command(CLI::App& app);
void add_export_command(CLI::App& app);
void add_voxelize_command(CLI::App& app);

// Base-10 unsigned 64-bit value; UsageError otherwise.
std::uint64_t parse_seed(const std::string& text);

}  // namespace kiip::cli
