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

#include "snro/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "snro/classify.hpp"
#include "snro/dataset.hpp"
#include "snro/rng.hpp"

namespace snro {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

struct SplitData {
  std::vector<FrameSequence> train;
  std::vector<FrameSequence> test;
  int num_classes = 0;
  int channels = 0;
};

SplitData load_split_data(const ExperimentConfig& cfg) {
  SplitData out;
  if (cfg.dataset == "synthetic") {
    const int per_class = cfg.samples_per_class + cfg.test_samples_per_class;
    auto all = generate_synthetic_dataset(
        cfg.num_classes, per_class, cfg.frames_per_video, cfg.frame_channels,
        cfg.frame_height, cfg.frame_width, cfg.dataset_seed);
    for (std::size_t i = 0; i < all.size(); ++i) {
      const int sample = static_cast<int>(i) % per_class;
      if (sample < cfg.samples_per_class) {
        out.train.push_back(std::move(all[i]));
      } else {
        out.test.push_back(std::move(all[i]));
      }
    }
    out.num_classes = cfg.num_classes;
    out.channels = cfg.frame_channels;
    return out;
  }

  auto all = load_frame_directory(cfg.frames_root, cfg.frames_per_video);
  std::map<int, std::vector<FrameSequence*>> by_class;
  for (auto& seq : all) by_class[seq.label].push_back(&seq);
  out.num_classes = static_cast<int>(by_class.size());
  for (auto& [cid, vids] : by_class) {
    const int n = static_cast<int>(vids.size());
    if (n < 2) {
      throw std::runtime_error("class " + std::to_string(cid) +
                               " needs at least 2 videos for a train/test split");
    }
    const int n_test = std::clamp(
        static_cast<int>(std::ceil(cfg.test_fraction * n)), 1, n - 1);
    for (int i = 0; i < n; ++i) {
      if (i < n - n_test) {
        out.train.push_back(std::move(*vids[i]));
      } else {
        out.test.push_back(std::move(*vids[i]));
      }
    }
  }
  out.channels = out.train.front().c;
  return out;
}

}  // namespace

ExperimentSpec build_experiment_spec(const ExperimentConfig& cfg,
                                     std::uint64_t seed) {
  SplitData data = load_split_data(cfg);

  const int rest = data.num_classes - cfg.initial_classes;
  if (rest < 0 || (rest > 0 && rest % cfg.classes_per_stage != 0)) {
    throw std::runtime_error(
        "schedule: " + std::to_string(data.num_classes) + " classes with " +
        std::to_string(cfg.initial_classes) + " initial and " +
        std::to_string(cfg.classes_per_stage) + " per stage do not divide");
  }

  ExperimentSpec spec;
  spec.train = std::move(data.train);
  spec.test = std::move(data.test);
  spec.schedule = make_schedule(data.num_classes, cfg.initial_classes,
                                cfg.classes_per_stage, seed);
  spec.model.in_channels = data.channels;
  spec.model.conv_channels = cfg.conv_channels;
  spec.model.shift_block = cfg.shift_block;
  spec.model.shift_fraction = cfg.shift_fraction;
  spec.model.head_init_scale = cfg.head_init_scale;
  spec.plan.base_epochs = cfg.base_epochs;
  spec.plan.finetune_epochs = cfg.finetune_epochs;
  spec.opts.batch_size = cfg.batch_size;
  spec.opts.learning_rate = cfg.learning_rate;
  spec.opts.lambda_distill = cfg.lambda_distill;
  spec.opts.distill_temperature = cfg.distill_temperature;
  spec.opts.alignment = *parse_align_mode(cfg.alignment);
  spec.opts.early_break = cfg.early_break;
  spec.opts.seed = seed;
  spec.f = cfg.frames_per_video;
  spec.f_bar = cfg.stored_frames_per_video;
  spec.budget_bytes_per_class = cfg.budget_bytes_per_class;
  spec.quantize_store = cfg.quantize_exemplars;
  spec.sparse_inference = cfg.sparse_inference;
  spec.seed = seed;
  spec.fingerprint = config_fingerprint(cfg);
  return spec;
}

std::string metrics_table_csv(const ExperimentResult& result,
                              const TaskSchedule& schedule) {
  std::ostringstream os;
  os << "task_id,n_classes_seen,acc_cnn,acc_nme,ACC_cnn,ACC_nme,FOR_cnn,"
        "FOR_nme\n";
  for (int k = 0; k < result.cnn.acc.tasks(); ++k) {
    os << k << ',' << schedule.classes_seen(k) << ','
       << fmt6(result.cnn.acc.at(k, k)) << ',' << fmt6(result.nme.acc.at(k, k))
       << ',' << fmt6(result.cnn.avg_accuracy[k]) << ','
       << fmt6(result.nme.avg_accuracy[k]) << ',';
    if (k >= 1) {
      os << fmt6(result.cnn.avg_forgetting[k]) << ','
         << fmt6(result.nme.avg_forgetting[k]);
    } else {
      os << "nan,nan";
    }
    os << '\n';
  }
  return os.str();
}

std::string metrics_to_json(const ExperimentResult& result,
                            std::uint64_t seed) {
  json j;
  j["seed"] = seed;
  j["threshold"] = result.threshold;
  j["acc_cnn"] = result.cnn.acc.rows();
  j["acc_nme"] = result.nme.acc.rows();
  j["avg_accuracy_cnn"] = result.cnn.avg_accuracy;
  j["avg_accuracy_nme"] = result.nme.avg_accuracy;
  json fcnn = json::array(), fnme = json::array();
  for (std::size_t k = 1; k < result.cnn.avg_forgetting.size(); ++k) {
    fcnn.push_back(result.cnn.avg_forgetting[k]);
    fnme.push_back(result.nme.avg_forgetting[k]);
  }
  j["avg_forgetting_cnn"] = std::move(fcnn);  // index 0 = task 1
  j["avg_forgetting_nme"] = std::move(fnme);
  json tasks = json::array();
  for (const auto& t : result.tasks) {
    tasks.push_back({{"task", t.task},
                     {"base_epochs_run", t.base_epochs_run},
                     {"early_break", t.early_break_triggered},
                     {"exemplars_stored", t.exemplars_stored},
                     {"end_param_hash", t.end_param_hash},
                     {"snapshot_hash_used", t.snapshot_hash_used}});
  }
  j["tasks"] = std::move(tasks);
  j["provenance"] = {
      {"batches_checked", result.provenance.batches_checked},
      {"new_samples", result.provenance.new_samples},
      {"exemplar_samples", result.provenance.exemplar_samples}};
  j["warnings"] = result.warnings;
  return j.dump(2);
}

std::string epoch_log_csv(const std::vector<EpochRecord>& log) {
  std::ostringstream os;
  os << "task,stage,epoch,loss,accuracy,batches\n";
  for (const auto& r : log) {
    os << r.task << ','
       << (r.stage == Stage::kBaseTrain ? "base" : "finetune") << ','
       << r.epoch << ',' << fmt6(r.loss) << ',' << fmt6(r.accuracy) << ','
       << r.batches << '\n';
  }
  return os.str();
}

std::string svg_line_chart(const std::string& title, const std::string& y_label,
                           const std::vector<ChartSeries>& series) {
  constexpr int kW = 720, kH = 440;
  constexpr int kL = 70, kR = 180, kT = 50, kB = 50;
  const double plot_w = kW - kL - kR;
  const double plot_h = kH - kT - kB;

  std::size_t max_n = 0;
  double y_min = 1e300, y_max = -1e300;
  for (const auto& s : series) {
    max_n = std::max(max_n, s.values.size());
    for (double v : s.values) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (max_n == 0) {
    y_min = 0;
    y_max = 1;
    max_n = 1;
  }
  if (y_max - y_min < 1e-9) {
    y_min -= 1.0;
    y_max += 1.0;
  }
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  auto xs = [&](std::size_t i) {
    return kL + (max_n == 1 ? plot_w / 2
                            : plot_w * static_cast<double>(i) /
                                  static_cast<double>(max_n - 1));
  };
  auto ys = [&](double v) { return kT + plot_h * (1.0 - (v - y_min) / (y_max - y_min)); };
  auto f2 = [](double v) {
    char b[32];
    std::snprintf(b, sizeof(b), "%.2f", v);
    return std::string(b);
  };

  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
     << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH
     << "\">\n";
  os << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  // axes
  os << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL
     << "\" y2=\"" << kT + plot_h << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kL << "\" y1=\"" << kT + plot_h << "\" x2=\""
     << kL + plot_w << "\" y2=\"" << kT + plot_h << "\" stroke=\"black\"/>\n";
  for (int g = 0; g <= 4; ++g) {
    const double v = y_min + (y_max - y_min) * g / 4.0;
    const double yy = ys(v);
    os << "<line x1=\"" << kL - 4 << "\" y1=\"" << f2(yy) << "\" x2=\""
       << kL + plot_w << "\" y2=\"" << f2(yy)
       << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << kL - 8 << "\" y=\"" << f2(yy + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << f2(v) << "</text>\n";
  }
  for (std::size_t i = 0; i < max_n; ++i) {
    os << "<text x=\"" << f2(xs(i)) << "\" y=\"" << kT + plot_h + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">" << i << "</text>\n";
  }
  os << "<text x=\"" << kL + plot_w / 2 << "\" y=\"" << kH - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">task</text>\n";
  os << "<text x=\"18\" y=\"" << kT + plot_h / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        "transform=\"rotate(-90 18 " << kT + plot_h / 2 << ")\">" << y_label
     << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % 6];
    std::ostringstream pts;
    for (std::size_t i = 0; i < series[s].values.size(); ++i) {
      pts << f2(xs(i)) << ',' << f2(ys(series[s].values[i])) << ' ';
    }
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"2\" points=\"" << pts.str() << "\"/>\n";
    for (std::size_t i = 0; i < series[s].values.size(); ++i) {
      os << "<circle cx=\"" << f2(xs(i)) << "\" cy=\""
         << f2(ys(series[s].values[i])) << "\" r=\"3\" fill=\"" << color
         << "\"/>\n";
    }
    const double ly = kT + 16.0 * static_cast<double>(s);
    os << "<rect x=\"" << kW - kR + 10 << "\" y=\"" << f2(ly) << "\" "
       << "width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << kW - kR + 28 << "\" y=\"" << f2(ly + 10)
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << series[s].name
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// CLI commands

namespace {

int report_config_errors(const std::vector<std::string>& errors) {
  for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
  return errors.empty() ? 0 : 1;
}

json load_summary(const fs::path& run_dir) {
  std::ifstream in(run_dir / "summary.json");
  if (!in) {
    throw std::runtime_error("not a completed run directory (no summary.json): " +
                             run_dir.string());
  }
  return json::parse(in);
}

}  // namespace

int cmd_validate(const fs::path& config_path) {
  std::vector<std::string> errors;
  const ExperimentConfig cfg = parse_config_file(config_path, errors);
  if (errors.empty()) {
    const auto sem = validate_config(cfg);
    errors.insert(errors.end(), sem.begin(), sem.end());
  }
  if (!errors.empty()) return report_config_errors(errors);
  std::cout << "config ok: " << config_path.string() << "\n";
  return 0;
}

int cmd_run(const fs::path& config_path, bool resume) {
  std::vector<std::string> errors;
  const ExperimentConfig cfg = parse_config_file(config_path, errors);
  if (errors.empty()) {
    const auto sem = validate_config(cfg);
    errors.insert(errors.end(), sem.begin(), sem.end());
  }
  if (!errors.empty()) return report_config_errors(errors);

  const fs::path out_dir = cfg.output_dir;
  fs::create_directories(out_dir);
  std::ofstream(out_dir / "config.json") << config_to_json(cfg) << "\n";

  std::vector<std::vector<double>> acc_cnn_curves, acc_nme_curves;
  std::vector<std::vector<double>> for_cnn_curves, for_nme_curves;
  json per_seed = json::object();
  int num_tasks = 0;
  std::vector<int> widths;

  for (std::uint64_t seed : cfg.seeds) {
    std::cout << "seed " << seed << ": running..." << std::flush;
    ExperimentSpec spec;
    ExperimentResult result;
    try {
      spec = build_experiment_spec(cfg, seed);
      num_tasks = spec.schedule.num_tasks();
      widths.clear();
      for (int k = 0; k < num_tasks; ++k) {
        widths.push_back(spec.schedule.classes_seen(k));
      }
      const fs::path run_dir = out_dir / ("seed_" + std::to_string(seed));
      fs::create_directories(run_dir);
      result = run_incremental_experiment(spec, run_dir, resume);
      std::ofstream(run_dir / "metrics.csv")
          << metrics_table_csv(result, spec.schedule);
      std::ofstream(run_dir / "metrics.json")
          << metrics_to_json(result, seed) << "\n";
      std::ofstream(run_dir / "epoch_log.csv") << epoch_log_csv(result.epoch_log);
    } catch (const std::exception& e) {
      std::cout << "\n";
      std::cerr << "run failed (seed " << seed << "): " << e.what() << "\n";
      return 1;
    }
    for (const auto& wmsg : result.warnings) {
      std::cerr << "warning: " << wmsg << "\n";
    }
    std::cout << " done; final ACC_cnn=" << fmt6(result.cnn.final_avg_accuracy())
              << " ACC_nme=" << fmt6(result.nme.final_avg_accuracy()) << "\n";

    acc_cnn_curves.push_back(result.cnn.avg_accuracy);
    acc_nme_curves.push_back(result.nme.avg_accuracy);
    std::vector<double> fc, fn;
    for (std::size_t k = 1; k < result.cnn.avg_forgetting.size(); ++k) {
      fc.push_back(result.cnn.avg_forgetting[k]);
      fn.push_back(result.nme.avg_forgetting[k]);
    }
    for_cnn_curves.push_back(fc);
    for_nme_curves.push_back(fn);
    per_seed[std::to_string(seed)] = {
        {"final_ACC_cnn", result.cnn.final_avg_accuracy()},
        {"final_ACC_nme", result.nme.final_avg_accuracy()},
        {"final_FOR_cnn", result.cnn.acc.tasks() > 1
                              ? result.cnn.final_avg_forgetting()
                              : 0.0},
        {"final_FOR_nme", result.nme.acc.tasks() > 1
                              ? result.nme.final_avg_forgetting()
                              : 0.0},
        {"threshold", result.threshold}};
  }

  // Cross-seed aggregation. Group sizes are seed-independent, so curves
  // align task-by-task.
  const std::size_t tasks = acc_cnn_curves.front().size();
  auto aggregate = [](const std::vector<std::vector<double>>& curves,
                      std::size_t n, auto f) {
    std::vector<double> out;
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> vals;
      for (const auto& c : curves) vals.push_back(c[k]);
      out.push_back(f(vals));
    }
    return out;
  };
  json summary;
  summary["schedule"] = {{"num_tasks", num_tasks},
                         {"n_classes_seen", widths}};
  summary["seeds"] = cfg.seeds;
  summary["per_seed"] = std::move(per_seed);
  summary["mean"] = {
      {"ACC_cnn_per_task", aggregate(acc_cnn_curves, tasks, mean_of)},
      {"ACC_nme_per_task", aggregate(acc_nme_curves, tasks, mean_of)},
      {"FOR_cnn_per_task",
       aggregate(for_cnn_curves, tasks > 0 ? tasks - 1 : 0, mean_of)},
      {"FOR_nme_per_task",
       aggregate(for_nme_curves, tasks > 0 ? tasks - 1 : 0, mean_of)}};
  summary["std"] = {
      {"ACC_cnn_per_task", aggregate(acc_cnn_curves, tasks, stddev_of)},
      {"ACC_nme_per_task", aggregate(acc_nme_curves, tasks, stddev_of)},
      {"FOR_cnn_per_task",
       aggregate(for_cnn_curves, tasks > 0 ? tasks - 1 : 0, stddev_of)},
      {"FOR_nme_per_task",
       aggregate(for_nme_curves, tasks > 0 ? tasks - 1 : 0, stddev_of)}};
  std::ofstream(out_dir / "summary.json") << summary.dump(2) << "\n";

  std::ostringstream txt;
  txt << "final average over " << cfg.seeds.size() << " seed(s)\n";
  txt << "  ACC_cnn " << fmt6(summary["mean"]["ACC_cnn_per_task"].back().get<double>())
      << " +- " << fmt6(summary["std"]["ACC_cnn_per_task"].back().get<double>())
      << "\n";
  txt << "  ACC_nme " << fmt6(summary["mean"]["ACC_nme_per_task"].back().get<double>())
      << " +- " << fmt6(summary["std"]["ACC_nme_per_task"].back().get<double>())
      << "\n";
  if (tasks > 1) {
    txt << "  FOR_cnn " << fmt6(summary["mean"]["FOR_cnn_per_task"].back().get<double>())
        << " +- " << fmt6(summary["std"]["FOR_cnn_per_task"].back().get<double>())
        << "\n";
    txt << "  FOR_nme " << fmt6(summary["mean"]["FOR_nme_per_task"].back().get<double>())
        << " +- " << fmt6(summary["std"]["FOR_nme_per_task"].back().get<double>())
        << "\n";
  }
  std::ofstream(out_dir / "summary.txt") << txt.str();
  std::cout << txt.str();
  return 0;
}

int cmd_compare(const std::vector<fs::path>& run_dirs,
                const fs::path& out_dir) {
  if (run_dirs.size() < 2) {
    std::cerr << "compare: need at least 2 run directories\n";
    return 1;
  }
  std::vector<json> summaries;
  try {
    for (const auto& dir : run_dirs) summaries.push_back(load_summary(dir));
  } catch (const std::exception& e) {
    std::cerr << "compare: " << e.what() << "\n";
    return 1;
  }
  const json& ref = summaries.front()["schedule"];
  for (std::size_t i = 1; i < summaries.size(); ++i) {
    if (summaries[i]["schedule"] != ref) {
      std::cerr << "compare: run " << run_dirs[i].string()
                << " has an incompatible schedule\n";
      return 1;
    }
  }

  fs::create_directories(out_dir);
  std::ostringstream csv, txt;
  csv << "run,ACC_cnn,ACC_nme,FOR_cnn,FOR_nme,dACC_cnn,dACC_nme,dFOR_cnn,"
         "dFOR_nme\n";
  txt << "run                              ACC_cnn   ACC_nme   FOR_cnn   "
         "FOR_nme\n";
  std::vector<ChartSeries> cnn_series, nme_series;
  std::vector<double> base(4, 0.0);
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const json& mean = summaries[i]["mean"];
    const double acc_cnn = mean["ACC_cnn_per_task"].back().get<double>();
    const double acc_nme = mean["ACC_nme_per_task"].back().get<double>();
    const double for_cnn = mean["FOR_cnn_per_task"].empty()
                               ? 0.0
                               : mean["FOR_cnn_per_task"].back().get<double>();
    const double for_nme = mean["FOR_nme_per_task"].empty()
                               ? 0.0
                               : mean["FOR_nme_per_task"].back().get<double>();
    if (i == 0) base = {acc_cnn, acc_nme, for_cnn, for_nme};
    const std::string name = run_dirs[i].filename().string().empty()
                                 ? run_dirs[i].string()
                                 : run_dirs[i].filename().string();
    csv << name << ',' << fmt6(acc_cnn) << ',' << fmt6(acc_nme) << ','
        << fmt6(for_cnn) << ',' << fmt6(for_nme) << ','
        << fmt6(acc_cnn - base[0]) << ',' << fmt6(acc_nme - base[1]) << ','
        << fmt6(for_cnn - base[2]) << ',' << fmt6(for_nme - base[3]) << '\n';
    char row[256];
    std::snprintf(row, sizeof(row), "%-32s %8.3f  %8.3f  %8.3f  %8.3f\n",
                  name.c_str(), acc_cnn, acc_nme, for_cnn, for_nme);
    txt << row;
    cnn_series.push_back(
        ChartSeries{name, mean["ACC_cnn_per_task"].get<std::vector<double>>()});
    nme_series.push_back(
        ChartSeries{name, mean["ACC_nme_per_task"].get<std::vector<double>>()});
  }

  std::ofstream(out_dir / "compare.csv") << csv.str();
  std::ofstream(out_dir / "compare.txt") << txt.str();
  std::ofstream(out_dir / "acc_cnn.svg")
      << svg_line_chart("average accuracy per task (CNN)", "ACC (%)",
                        cnn_series);
  std::ofstream(out_dir / "acc_nme.svg")
      << svg_line_chart("average accuracy per task (NME)", "ACC (%)",
                        nme_series);
  std::cout << txt.str();
  std::cout << "wrote " << (out_dir / "compare.csv").string() << ", plots in "
            << out_dir.string() << "\n";
  return 0;
}

int cmd_export_dataset(const fs::path& config_path, const fs::path& out_dir) {
  std::vector<std::string> errors;
  const ExperimentConfig cfg = parse_config_file(config_path, errors);
  if (errors.empty()) {
    const auto sem = validate_config(cfg);
    errors.insert(errors.end(), sem.begin(), sem.end());
  }
  if (!errors.empty()) return report_config_errors(errors);
  try {
    SplitData data = load_split_data(cfg);
    std::vector<FrameSequence> all;
    for (auto& s : data.train) all.push_back(std::move(s));
    for (auto& s : data.test) all.push_back(std::move(s));
    export_frame_directory(all, out_dir);
    std::cout << "exported " << all.size() << " videos to " << out_dir.string()
              << "\n";
  } catch (const std::exception& e) {
    std::cerr << "export-dataset: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace snro
