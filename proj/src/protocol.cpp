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

#include "snro/protocol.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "snro/rng.hpp"

namespace snro {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct EpochEntry {
  bool exemplar = false;
  std::size_t index = 0;
};

double batch_accuracy(const Eigen::MatrixXd& logits,
                      const std::vector<int>& labels) {
  int correct = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index arg = 0;
    logits.row(i).maxCoeff(&arg);
    if (static_cast<int>(arg) == labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.rows());
}

void check_provenance(const std::vector<SampleTag>& tags, Stage stage,
                      int task_index, ProvenanceStats* prov) {
  for (const SampleTag& tag : tags) {
    if (stage == Stage::kBaseTrain) {
      const bool ok = tag.is_exemplar ? tag.origin_task < task_index
                                      : tag.origin_task == task_index;
      if (!ok) {
        throw std::logic_error(
            "protocol violation: Base Train batch of task " +
            std::to_string(task_index) + " contains a sample from task " +
            std::to_string(tag.origin_task) +
            (tag.is_exemplar ? " (exemplar)" : " (new data)"));
      }
    } else {
      if (!tag.is_exemplar || tag.origin_task > task_index) {
        throw std::logic_error(
            "protocol violation: Fine Tune batch of task " +
            std::to_string(task_index) + " contains a non-exemplar or "
            "future-task sample");
      }
    }
    if (prov) {
      if (tag.is_exemplar) {
        prov->exemplar_samples += 1;
      } else {
        prov->new_samples += 1;
      }
    }
  }
  if (prov) prov->batches_checked += 1;
}

int head_label_for(const std::map<int, int>& class_to_head, int class_id) {
  auto it = class_to_head.find(class_id);
  if (it == class_to_head.end()) {
    throw std::logic_error("protocol: class " + std::to_string(class_id) +
                           " has no head slot");
  }
  return it->second;
}

struct TrainedEpoch {
  double loss = 0.0;
  double accuracy = 0.0;  // percent
  int batches = 0;
};

// One pass over `entries` in batches: loss+grad, SGD step, accuracy.
TrainedEpoch train_one_epoch(VideoNet& model,
                             const std::vector<EpochEntry>& entries,
                             const std::vector<const FrameSequence*>& new_data,
                             const ReplayBuffer* replay,
                             const std::map<int, int>& class_to_head,
                             const TrainOptions& opts, Stage stage,
                             int task_index, const TaskSchedule& schedule,
                             ProvenanceStats* prov) {
  const double lambda = model.has_snapshot() ? opts.lambda_distill : 0.0;
  TrainedEpoch out;
  double acc_sum = 0.0;
  std::size_t pos = 0;
  while (pos < entries.size()) {
    const std::size_t take = std::min<std::size_t>(
        static_cast<std::size_t>(opts.batch_size), entries.size() - pos);
    Batch batch;
    std::vector<SampleTag> tags;
    tags.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
      const EpochEntry& e = entries[pos + i];
      const FrameSequence& seq =
          e.exemplar ? replay->sequence(e.index) : *new_data[e.index];
      batch_append(batch, seq, head_label_for(class_to_head, seq.label));
      tags.push_back(SampleTag{schedule.task_of_class(seq.label), e.exemplar});
    }
    check_provenance(tags, stage, task_index, prov);
    VideoNet::LossGrad lg =
        model.training_loss_and_grad(batch, lambda, opts.distill_temperature);
    acc_sum += batch_accuracy(lg.logits, batch.labels);
    model.apply_gradient(lg.grad, opts.learning_rate);
    out.loss += lg.loss;
    out.batches += 1;
    pos += take;
  }
  if (out.batches > 0) {
    out.loss /= out.batches;
    out.accuracy = 100.0 * acc_sum / out.batches;
  }
  return out;
}

std::vector<EpochEntry> base_epoch_entries(std::size_t new_count,
                                           const ReplayBuffer* replay,
                                           const TrainOptions& opts,
                                           int task_index, int epoch) {
  std::vector<EpochEntry> entries;
  entries.reserve(new_count + (replay ? replay->size() : 0));
  for (std::size_t i = 0; i < new_count; ++i) {
    entries.push_back(EpochEntry{false, i});
  }
  if (replay && replay->size() > 0) {
    const auto order = replay->epoch_order(
        seed_mix({opts.seed, fnv1a64("base_replay"),
                  static_cast<std::uint64_t>(task_index),
                  static_cast<std::uint64_t>(epoch)}),
        /*balanced=*/false);
    for (std::size_t idx : order) entries.push_back(EpochEntry{true, idx});
  }
  DetRng rng(seed_mix({opts.seed, fnv1a64("base_order"),
                       static_cast<std::uint64_t>(task_index),
                       static_cast<std::uint64_t>(epoch)}));
  rng.shuffle(entries);
  return entries;
}

constexpr int kRunStateVersion = 1;

}  // namespace

int early_break_stop_epoch(const std::vector<double>& accs, double threshold,
                           int cap) {
  if (cap < 1) throw std::invalid_argument("early_break_stop_epoch: cap < 1");
  for (int e = 1; e <= cap && e <= static_cast<int>(accs.size()); ++e) {
    if (accs[e - 1] >= threshold) return e;
  }
  return cap;
}

BaseTrainResult run_base_train(VideoNet& model,
                               const std::vector<const FrameSequence*>& task_data,
                               const ReplayBuffer* replay,
                               const std::map<int, int>& class_to_head,
                               StagePlan& plan, const TrainOptions& opts,
                               bool is_initial, int task_index,
                               const TaskSchedule& schedule,
                               ProvenanceStats* prov, const TrainHooks* hooks) {
  if (task_data.empty()) {
    throw std::invalid_argument("run_base_train: no new-task data");
  }
  if (is_initial && plan.threshold.has_value()) {
    throw std::logic_error("run_base_train: threshold already recorded; the "
                           "initial task must run exactly once");
  }
  if (!is_initial && !plan.threshold.has_value()) {
    throw std::logic_error("run_base_train: incremental task " +
                           std::to_string(task_index) +
                           " requires the initial-task threshold");
  }

  const int max_epochs = is_initial ? plan.base_epochs : plan.incremental_cap();
  BaseTrainResult result;
  double best_acc = 0.0;

  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    const std::vector<EpochEntry> entries =
        base_epoch_entries(task_data.size(), replay, opts, task_index, epoch);
    const TrainedEpoch te =
        train_one_epoch(model, entries, task_data, replay, class_to_head, opts,
                        Stage::kBaseTrain, task_index, schedule, prov);
    double epoch_acc = te.accuracy;
    if (hooks && hooks->epoch_accuracy_override) {
      epoch_acc = hooks->epoch_accuracy_override(epoch);
    }
    result.log.push_back(EpochRecord{task_index, Stage::kBaseTrain, epoch,
                                     te.loss, epoch_acc, te.batches});
    result.epochs_run = epoch;
    best_acc = std::max(best_acc, epoch_acc);
    if (!is_initial && opts.early_break && epoch_acc >= *plan.threshold) {
      result.early_break_triggered = true;
      break;
    }
  }

  if (is_initial) plan.threshold = best_acc;
  return result;
}

std::vector<EpochRecord> run_fine_tune(VideoNet& model,
                                       const ReplayBuffer& replay,
                                       const std::map<int, int>& class_to_head,
                                       const StagePlan& plan,
                                       const TrainOptions& opts, int task_index,
                                       const TaskSchedule& schedule,
                                       ProvenanceStats* prov) {
  if (replay.size() == 0) {
    throw std::logic_error("run_fine_tune: empty exemplar store");
  }
  std::vector<EpochRecord> log;
  for (int epoch = 1; epoch <= plan.finetune_epochs; ++epoch) {
    const auto order = replay.epoch_order(
        seed_mix({opts.seed, fnv1a64("ft_order"),
                  static_cast<std::uint64_t>(task_index),
                  static_cast<std::uint64_t>(epoch)}),
        /*balanced=*/true);
    std::vector<EpochEntry> entries;
    entries.reserve(order.size());
    for (std::size_t idx : order) entries.push_back(EpochEntry{true, idx});
    const TrainedEpoch te =
        train_one_epoch(model, entries, {}, &replay, class_to_head, opts,
                        Stage::kFineTune, task_index, schedule, prov);
    log.push_back(EpochRecord{task_index, Stage::kFineTune, epoch, te.loss,
                              te.accuracy, te.batches});
  }
  return log;
}

// ---------------------------------------------------------------------------
// Full experiment with optional persistence/resume.

namespace {

json epoch_log_to_json(const std::vector<EpochRecord>& log) {
  json arr = json::array();
  for (const auto& r : log) {
    arr.push_back({r.task, static_cast<int>(r.stage), r.epoch, r.loss,
                   r.accuracy, r.batches});
  }
  return arr;
}

std::vector<EpochRecord> epoch_log_from_json(const json& arr) {
  std::vector<EpochRecord> log;
  for (const auto& row : arr) {
    log.push_back(EpochRecord{row.at(0).get<int>(),
                              static_cast<Stage>(row.at(1).get<int>()),
                              row.at(2).get<int>(), row.at(3).get<double>(),
                              row.at(4).get<double>(), row.at(5).get<int>()});
  }
  return log;
}

json acc_matrix_to_json(const AccMatrix& m) {
  json arr = json::array();
  for (const auto& row : m.rows()) arr.push_back(row);
  return arr;
}

AccMatrix acc_matrix_from_json(const json& arr) {
  AccMatrix m;
  for (const auto& row : arr) m.push_row(row.get<std::vector<double>>());
  return m;
}

struct RunState {
  int completed_tasks = 0;
  std::optional<double> threshold;
  AccMatrix acc_cnn, acc_nme;
  std::vector<EpochRecord> epoch_log;
  std::vector<TaskRunInfo> tasks;
  ProvenanceStats provenance;
  std::vector<std::string> warnings;
};

void save_run_state(const fs::path& run_dir, const ExperimentSpec& spec,
                    const RunState& st) {
  json root;
  root["format_version"] = kRunStateVersion;
  root["fingerprint"] = spec.fingerprint;
  root["seed"] = spec.seed;
  root["completed_tasks"] = st.completed_tasks;
  if (st.threshold) root["threshold"] = *st.threshold;
  root["acc_cnn"] = acc_matrix_to_json(st.acc_cnn);
  root["acc_nme"] = acc_matrix_to_json(st.acc_nme);
  root["epoch_log"] = epoch_log_to_json(st.epoch_log);
  json tasks = json::array();
  for (const auto& t : st.tasks) {
    tasks.push_back({{"task", t.task},
                     {"base_epochs_run", t.base_epochs_run},
                     {"early_break", t.early_break_triggered},
                     {"exemplars_stored", t.exemplars_stored},
                     {"end_param_hash", t.end_param_hash},
                     {"snapshot_hash_used", t.snapshot_hash_used}});
  }
  root["tasks"] = std::move(tasks);
  root["provenance"] = {{"batches_checked", st.provenance.batches_checked},
                        {"new_samples", st.provenance.new_samples},
                        {"exemplar_samples", st.provenance.exemplar_samples}};
  root["warnings"] = st.warnings;
  std::ofstream(run_dir / "run_state.json") << root.dump(2) << "\n";
}

std::optional<RunState> load_run_state(const fs::path& run_dir,
                                       const ExperimentSpec& spec) {
  std::ifstream in(run_dir / "run_state.json");
  if (!in) return std::nullopt;
  json root = json::parse(in);
  if (root.at("format_version").get<int>() != kRunStateVersion) {
    throw std::runtime_error("run_state.json: unsupported format version");
  }
  if (root.at("fingerprint").get<std::uint64_t>() != spec.fingerprint ||
      root.at("seed").get<std::uint64_t>() != spec.seed) {
    throw std::runtime_error(
        "run_state.json does not match the current config/seed; refusing to "
        "resume");
  }
  RunState st;
  st.completed_tasks = root.at("completed_tasks").get<int>();
  if (root.contains("threshold")) st.threshold = root.at("threshold").get<double>();
  st.acc_cnn = acc_matrix_from_json(root.at("acc_cnn"));
  st.acc_nme = acc_matrix_from_json(root.at("acc_nme"));
  st.epoch_log = epoch_log_from_json(root.at("epoch_log"));
  for (const auto& t : root.at("tasks")) {
    TaskRunInfo info;
    info.task = t.at("task").get<int>();
    info.base_epochs_run = t.at("base_epochs_run").get<int>();
    info.early_break_triggered = t.at("early_break").get<bool>();
    info.exemplars_stored = t.at("exemplars_stored").get<int>();
    info.end_param_hash = t.at("end_param_hash").get<std::uint64_t>();
    info.snapshot_hash_used = t.at("snapshot_hash_used").get<std::uint64_t>();
    st.tasks.push_back(info);
  }
  st.provenance.batches_checked =
      root.at("provenance").at("batches_checked").get<long long>();
  st.provenance.new_samples =
      root.at("provenance").at("new_samples").get<long long>();
  st.provenance.exemplar_samples =
      root.at("provenance").at("exemplar_samples").get<long long>();
  st.warnings = root.at("warnings").get<std::vector<std::string>>();
  return st;
}

}  // namespace

ExperimentResult run_incremental_experiment(
    const ExperimentSpec& spec, const std::optional<fs::path>& run_dir,
    bool resume, int max_tasks) {
  const TaskSchedule& schedule = spec.schedule;
  const int num_tasks = schedule.num_tasks();
  if (num_tasks < 1) {
    throw std::invalid_argument("experiment: schedule has no tasks");
  }
  if (spec.f % spec.f_bar != 0) {
    throw std::invalid_argument("experiment: F must be divisible by F_bar");
  }
  if (spec.train.empty()) {
    throw std::invalid_argument("experiment: no training data");
  }
  const int c = spec.train.front().c;
  const int h = spec.train.front().h;
  const int w = spec.train.front().w;
  const std::int64_t frame_bytes = static_cast<std::int64_t>(c) * h * w;

  // Head slots follow first-appearance order over the schedule.
  std::map<int, int> class_to_head;
  {
    int slot = 0;
    for (const auto& group : schedule.groups) {
      for (int cid : group) class_to_head[cid] = slot++;
    }
  }

  VideoNet model(spec.model, seed_mix({spec.seed, fnv1a64("model_init")}));
  ExemplarStore store(spec.f, spec.f_bar, frame_bytes,
                      spec.budget_bytes_per_class, spec.quantize_store);
  StagePlan plan = spec.plan;
  RunState st;

  int start_task = 0;
  if (run_dir) {
    fs::create_directories(*run_dir / "checkpoints");
    if (resume) {
      if (auto prev = load_run_state(*run_dir, spec)) {
        st = std::move(*prev);
        start_task = st.completed_tasks;
        if (start_task > 0) {
          plan.threshold = st.threshold;
          model = VideoNet::load(*run_dir / "checkpoints" /
                                 ("task_" + std::to_string(start_task - 1)));
          model.set_snapshot();
          store = ExemplarStore::load(*run_dir / "store");
          // Head already covers the completed tasks.
        }
      }
    }
  }
  if (start_task == 0) {
    st = RunState{};
    plan.threshold.reset();
  }

  const int stop_task =
      max_tasks > 0 ? std::min(num_tasks, max_tasks) : num_tasks;

  SparseInference sparse;
  sparse.enabled = spec.sparse_inference;
  sparse.f = spec.f;
  sparse.f_bar = spec.f_bar;
  sparse.mode = spec.opts.alignment == AlignMode::kNone
                    ? AlignMode::kRepeated
                    : spec.opts.alignment;

  for (int k = start_task; k < stop_task; ++k) {
    const std::vector<int>& group = schedule.groups[k];
    TaskRunInfo info;
    info.task = k;

    // Snapshot discipline: the distillation reference for task k must be
    // the model state at the end of task k-1's Fine Tune.
    if (k > 0) {
      if (!model.has_snapshot()) {
        throw std::logic_error("protocol violation: task " + std::to_string(k) +
                               " has no distillation snapshot");
      }
      info.snapshot_hash_used = model.snapshot_hash();
      if (info.snapshot_hash_used != st.tasks.back().end_param_hash) {
        throw std::logic_error(
            "protocol violation: distillation snapshot of task " +
            std::to_string(k) + " is not the end state of task " +
            std::to_string(k - 1));
      }
    }

    model.expand_head(static_cast<int>(group.size()));

    std::vector<const FrameSequence*> task_train;
    for (const auto& seq : spec.train) {
      if (std::find(group.begin(), group.end(), seq.label) != group.end()) {
        task_train.push_back(&seq);
      }
    }
    if (task_train.empty()) {
      throw std::invalid_argument("experiment: task " + std::to_string(k) +
                                  " has no training data");
    }

    std::optional<ReplayBuffer> base_replay;
    if (!store.empty()) base_replay.emplace(store, spec.opts.alignment);

    const BaseTrainResult base = run_base_train(
        model, task_train, base_replay ? &*base_replay : nullptr, class_to_head,
        plan, spec.opts, /*is_initial=*/k == 0, k, schedule, &st.provenance);
    info.base_epochs_run = base.epochs_run;
    info.early_break_triggered = base.early_break_triggered;
    st.epoch_log.insert(st.epoch_log.end(), base.log.begin(), base.log.end());

    // Memory set for the new classes, herding on end-of-Base-Train features.
    std::vector<FrameSequence> task_train_copy;
    task_train_copy.reserve(task_train.size());
    for (const auto* p : task_train) task_train_copy.push_back(*p);
    const MemoryBuildReport report = store.build_memory_set(
        task_train_copy,
        [&model](const FrameSequence& seq) { return model.features_of(seq); },
        group);
    for (const auto& wmsg : report.warnings) st.warnings.push_back(wmsg);
    for (const auto& [cid, n] : report.stored_per_class) {
      info.exemplars_stored += n;
    }

    ReplayBuffer ft_replay(store, spec.opts.alignment);
    const auto ft_log = run_fine_tune(model, ft_replay, class_to_head, plan,
                                      spec.opts, k, schedule, &st.provenance);
    st.epoch_log.insert(st.epoch_log.end(), ft_log.begin(), ft_log.end());

    model.set_snapshot();
    info.end_param_hash = model.param_hash();

    // Evaluate on the test sets of all tasks seen so far.
    std::vector<double> row_cnn, row_nme;
    for (int j = 0; j <= k; ++j) {
      std::vector<FrameSequence> task_test;
      for (const auto& seq : spec.test) {
        const auto& gj = schedule.groups[j];
        if (std::find(gj.begin(), gj.end(), seq.label) != gj.end()) {
          task_test.push_back(seq);
        }
      }
      if (task_test.empty()) {
        throw std::invalid_argument("experiment: task " + std::to_string(j) +
                                    " has no test data");
      }
      row_cnn.push_back(
          classify_cnn(model, task_test, class_to_head, sparse));
      row_nme.push_back(classify_nme(model, store, task_test,
                                     spec.opts.alignment, sparse));
    }
    st.acc_cnn.push_row(std::move(row_cnn));
    st.acc_nme.push_row(std::move(row_nme));

    st.tasks.push_back(info);
    st.completed_tasks = k + 1;
    st.threshold = plan.threshold;

    if (run_dir) {
      model.save(*run_dir / "checkpoints" / ("task_" + std::to_string(k)));
      store.save(*run_dir / "store");
      save_run_state(*run_dir, spec, st);
    }
  }

  ExperimentResult result;
  result.cnn = RunMetrics::from_matrix(st.acc_cnn);
  result.nme = RunMetrics::from_matrix(st.acc_nme);
  result.epoch_log = std::move(st.epoch_log);
  result.tasks = std::move(st.tasks);
  result.provenance = st.provenance;
  result.threshold = st.threshold.value_or(0.0);
  result.warnings = std::move(st.warnings);
  return result;
}

}  // namespace snro
