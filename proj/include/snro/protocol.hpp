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

#ifndef SNRO_PROTOCOL_HPP
#define SNRO_PROTOCOL_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snro/classify.hpp"
#include "snro/dataset.hpp"
#include "snro/memory.hpp"
#include "snro/metrics.hpp"
#include "snro/model.hpp"

namespace snro {

/// Per-run stage plan. The initial task always trains exactly
/// base_epochs epochs and records its best training accuracy as the
/// early-break threshold; incremental tasks train at most
/// incremental_cap() epochs and stop once the threshold is reached.
struct StagePlan {
  int base_epochs = 50;  // N
  int finetune_epochs = 30;
  std::optional<double> threshold;  // percent; set once, at end of task 0

  int incremental_cap() const { return base_epochs / 2; }
};

struct TrainOptions {
  int batch_size = 8;
  double learning_rate = 0.05;
  double lambda_distill = 1.0;
  double distill_temperature = 2.0;
  AlignMode alignment = AlignMode::kRepeated;
  bool early_break = true;
  std::uint64_t seed = 0;
};

enum class Stage { kBaseTrain = 0, kFineTune = 1 };

struct EpochRecord {
  int task = 0;
  Stage stage = Stage::kBaseTrain;
  int epoch = 0;  // 1-based within the stage
  double loss = 0.0;
  double accuracy = 0.0;  // percent, mean of per-batch top-1
  int batches = 0;
};

/// Batch provenance: where each training sample came from. Checked on
/// every batch against the stage's data-access rule.
struct SampleTag {
  int origin_task = -1;
  bool is_exemplar = false;
};

struct ProvenanceStats {
  long long batches_checked = 0;
  long long new_samples = 0;
  long long exemplar_samples = 0;
};

/// Test seams; production runs leave these empty.
struct TrainHooks {
  /// Replaces the measured epoch accuracy fed to the early-break rule
  /// (and recorded in the epoch log). Argument is the 1-based epoch.
  std::function<double(int)> epoch_accuracy_override;
};

struct BaseTrainResult {
  int epochs_run = 0;
  bool early_break_triggered = false;
  std::vector<EpochRecord> log;
};

/// Pure early-break stopping rule: first 1-based index with
/// accs[i-1] >= threshold, else cap. accs must hold at least cap entries.
int early_break_stop_epoch(const std::vector<double>& accs, double threshold,
                           int cap);

/// One Base Train stage. New-task data is used at full F frames; replay
/// exemplars (classes from earlier tasks only) arrive through the given
/// buffer, already aligned. The initial task records plan.threshold.
BaseTrainResult run_base_train(VideoNet& model,
                               const std::vector<const FrameSequence*>& task_data,
                               const ReplayBuffer* replay,
                               const std::map<int, int>& class_to_head,
                               StagePlan& plan, const TrainOptions& opts,
                               bool is_initial, int task_index,
                               const TaskSchedule& schedule,
                               ProvenanceStats* prov = nullptr,
                               const TrainHooks* hooks = nullptr);

/// One Fine Tune stage: exactly plan.finetune_epochs epochs over
/// exemplars only, class-balanced, never early-exits.
std::vector<EpochRecord> run_fine_tune(VideoNet& model,
                                       const ReplayBuffer& replay,
                                       const std::map<int, int>& class_to_head,
                                       const StagePlan& plan,
                                       const TrainOptions& opts, int task_index,
                                       const TaskSchedule& schedule,
                                       ProvenanceStats* prov = nullptr);

/// Everything a full incremental run needs, independent of config files.
struct ExperimentSpec {
  std::vector<FrameSequence> train;
  std::vector<FrameSequence> test;
  TaskSchedule schedule;
  ModelConfig model;
  StagePlan plan;
  TrainOptions opts;
  int f = 8;
  int f_bar = 4;
  std::int64_t budget_bytes_per_class = 0;
  bool quantize_store = true;
  bool sparse_inference = false;
  std::uint64_t seed = 0;
  std::uint64_t fingerprint = 0;  // guards resume against config changes
};

struct TaskRunInfo {
  int task = 0;
  int base_epochs_run = 0;
  bool early_break_triggered = false;
  int exemplars_stored = 0;
  std::uint64_t end_param_hash = 0;       // after Fine Tune
  std::uint64_t snapshot_hash_used = 0;   // distillation reference (k > 0)
};

struct ExperimentResult {
  RunMetrics cnn;
  RunMetrics nme;
  std::vector<EpochRecord> epoch_log;
  std::vector<TaskRunInfo> tasks;
  ProvenanceStats provenance;
  double threshold = 0.0;
  std::vector<std::string> warnings;
};

/// Full protocol: per task, expand head -> Base Train on D_k plus aligned
/// exemplars -> build the task's memory set -> Fine Tune on all memory
/// sets -> snapshot for distillation -> evaluate on all tasks seen.
/// When run_dir is set, per-task checkpoints, the store and a resumable
/// run state are persisted there; with resume=true a matching partial
/// state is picked up after its last completed task.
ExperimentResult run_incremental_experiment(
    const ExperimentSpec& spec,
    const std::optional<std::filesystem::path>& run_dir = std::nullopt,
    bool resume = false, int max_tasks = -1);

}  // namespace snro

#endif  // SNRO_PROTOCOL_HPP
