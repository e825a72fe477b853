/*
 * Copyright (c) 2026 SNRO Contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <CLI11.hpp>
#include <string>
#include <vector>

#include "snro/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"snro: class-incremental video learning experiments with "
               "sparse exemplar memory, frame alignment and early break"};
  app.require_subcommand(1);

  std::string config_path;
  bool resume = false;
  auto* validate = app.add_subcommand("validate", "check a config file");
  validate->add_option("config", config_path, "config JSON")->required();

  std::string run_config;
  auto* run = app.add_subcommand("run", "execute all seeds of an experiment");
  run->add_option("config", run_config, "config JSON")->required();
  run->add_flag("--resume", resume, "continue a partially completed run");

  std::vector<std::string> dirs;
  std::string compare_out = "compare_out";
  auto* compare = app.add_subcommand("compare", "tabulate and plot runs");
  compare->add_option("dirs", dirs, "completed run directories")
      ->required()
      ->expected(-2);
  compare->add_option("--out", compare_out, "output directory");

  std::string export_config, export_dir;
  auto* exp = app.add_subcommand("export-dataset",
                                 "write the config's dataset as frame dirs");
  exp->add_option("config", export_config, "config JSON")->required();
  exp->add_option("dir", export_dir, "destination directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (*validate) return snro::cmd_validate(config_path);
  if (*run) return snro::cmd_run(run_config, resume);
  if (*compare) {
    std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
    return snro::cmd_compare(paths, compare_out);
  }
  if (*exp) return snro::cmd_export_dataset(export_config, export_dir);
  return 1;
}
