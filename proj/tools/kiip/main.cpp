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

#include "common.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kinematically informed multi-view voxelization and classification"};
  app.name("kiip");
  app.require_subcommand(1);
  kiip::cli::add_scan_command(app);
  kiip::cli::add_experiment_command(app);
  kiip::cli::add_export_command(app);
  kiip::cli::add_train_command(app);
  kiip::cli::add_predict_command(app);
  kiip::cli::add_voxelize_command(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const kiip::cli::UsageError& e) {
    std::cerr << "kiip: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "kiip: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
