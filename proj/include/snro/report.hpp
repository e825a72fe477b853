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

#ifndef SNRO_REPORT_HPP
#define SNRO_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "snro/config.hpp"
#include "snro/protocol.hpp"

namespace snro {

/// Materialize the per-seed experiment: generate or ingest the dataset,
/// split train/test, build schedule, model and stage plan.
ExperimentSpec build_experiment_spec(const ExperimentConfig& cfg,
                                     std::uint64_t seed);

/// Metric table, one row per task:
/// task_id,n_classes_seen,acc_cnn,acc_nme,ACC_cnn,ACC_nme,FOR_cnn,FOR_nme
/// where acc_* is the newest task's test accuracy a_{k,k} and FOR of the
/// initial task is written as nan.
std::string metrics_table_csv(const ExperimentResult& result,
                              const TaskSchedule& schedule);

std::string metrics_to_json(const ExperimentResult& result,
                            std::uint64_t seed);

std::string epoch_log_csv(const std::vector<EpochRecord>& log);

/// Simple SVG polyline chart; one series per run.
struct ChartSeries {
  std::string name;
  std::vector<double> values;  // y per task index
};
std::string svg_line_chart(const std::string& title,
                           const std::string& y_label,
                           const std::vector<ChartSeries>& series);

// CLI entry points (exit code 0 on success).
int cmd_validate(const std::filesystem::path& config_path);
int cmd_run(const std::filesystem::path& config_path, bool resume);
int cmd_compare(const std::vector<std::filesystem::path>& run_dirs,
                const std::filesystem::path& out_dir);
int cmd_export_dataset(const std::filesystem::path& config_path,
                       const std::filesystem::path& out_dir);

}  // namespace snro

#endif  // SNRO_REPORT_HPP
