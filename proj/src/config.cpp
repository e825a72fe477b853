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

#include "snro/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>

#include "snro/memory.hpp"
#include "snro/model.hpp"
#include "snro/rng.hpp"

namespace snro {

using nlohmann::json;

namespace {

class Reader {
 public:
  Reader(const json& root, std::vector<std::string>& errors)
      : root_(root), errors_(errors) {}

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = root_.find(key);
    if (it == root_.end()) return;  // keep default
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      errors_.push_back(std::string("key '") + key + "': wrong type");
    }
  }

  void finish() {
    for (auto it = root_.begin(); it != root_.end(); ++it) {
      if (!seen_.count(it.key())) {
        errors_.push_back("unknown key '" + it.key() + "'");
      }
    }
  }

 private:
  const json& root_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

}  // namespace

ExperimentConfig parse_config_file(const std::filesystem::path& path,
                                   std::vector<std::string>& errors) {
  ExperimentConfig cfg;
  std::ifstream in(path);
  if (!in) {
    errors.push_back("cannot open config file: " + path.string());
    return cfg;
  }
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    errors.push_back(std::string("config is not valid JSON: ") + e.what());
    return cfg;
  }
  if (!root.is_object()) {
    errors.push_back("config root must be a JSON object");
    return cfg;
  }

  Reader r(root, errors);
  r.get("dataset", cfg.dataset);
  r.get("num_classes", cfg.num_classes);
  r.get("samples_per_class", cfg.samples_per_class);
  r.get("test_samples_per_class", cfg.test_samples_per_class);
  r.get("frame_channels", cfg.frame_channels);
  r.get("frame_height", cfg.frame_height);
  r.get("frame_width", cfg.frame_width);
  r.get("dataset_seed", cfg.dataset_seed);
  r.get("frames_root", cfg.frames_root);
  r.get("test_fraction", cfg.test_fraction);
  r.get("initial_classes", cfg.initial_classes);
  r.get("classes_per_stage", cfg.classes_per_stage);
  r.get("frames_per_video", cfg.frames_per_video);
  r.get("stored_frames_per_video", cfg.stored_frames_per_video);
  r.get("alignment", cfg.alignment);
  r.get("budget_bytes_per_class", cfg.budget_bytes_per_class);
  r.get("quantize_exemplars", cfg.quantize_exemplars);
  r.get("base_epochs", cfg.base_epochs);
  r.get("finetune_epochs", cfg.finetune_epochs);
  r.get("batch_size", cfg.batch_size);
  r.get("learning_rate", cfg.learning_rate);
  r.get("lambda_distill", cfg.lambda_distill);
  r.get("distill_temperature", cfg.distill_temperature);
  r.get("conv_channels", cfg.conv_channels);
  r.get("shift_block", cfg.shift_block);
  r.get("shift_fraction", cfg.shift_fraction);
  r.get("head_init_scale", cfg.head_init_scale);
  r.get("seeds", cfg.seeds);
  r.get("output_dir", cfg.output_dir);
  r.get("sparse_inference", cfg.sparse_inference);
  r.get("early_break", cfg.early_break);
  r.get("baseline_mode", cfg.baseline_mode);
  r.finish();
  return cfg;
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> errors;
  auto bad = [&errors](const std::string& msg) { errors.push_back(msg); };

  const bool synthetic = cfg.dataset == "synthetic";
  if (!synthetic && cfg.dataset != "frames") {
    bad("key 'dataset': must be \"synthetic\" or \"frames\"");
  }

  if (synthetic) {
    if (cfg.num_classes < 2) bad("key 'num_classes': need at least 2 classes");
    if (cfg.samples_per_class < 1) {
      bad("key 'samples_per_class': must be >= 1");
    }
    if (cfg.test_samples_per_class < 1) {
      bad("key 'test_samples_per_class': must be >= 1");
    }
    if (cfg.frame_channels < 1 || cfg.frame_height < 1 || cfg.frame_width < 1) {
      bad("keys 'frame_channels/height/width': dimensions must be >= 1");
    }
    const int rest = cfg.num_classes - cfg.initial_classes;
    if (cfg.initial_classes < 1 || cfg.initial_classes > cfg.num_classes) {
      bad("key 'initial_classes': out of range");
    } else if (rest > 0) {
      if (cfg.classes_per_stage < 1) {
        bad("key 'classes_per_stage': must be >= 1");
      } else if (rest % cfg.classes_per_stage != 0) {
        bad("key 'classes_per_stage': " + std::to_string(rest) +
            " remaining classes not divisible by " +
            std::to_string(cfg.classes_per_stage));
      }
    }
  } else {
    if (cfg.frames_root.empty()) {
      bad("key 'frames_root': required for dataset=\"frames\"");
    }
    if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
      bad("key 'test_fraction': must be in (0, 1)");
    }
  }

  if (cfg.frames_per_video < 1) bad("key 'frames_per_video': must be >= 1");
  if (cfg.stored_frames_per_video < 1) {
    bad("key 'stored_frames_per_video': must be >= 1");
  } else if (cfg.frames_per_video % cfg.stored_frames_per_video != 0) {
    bad("key 'stored_frames_per_video': frames_per_video=" +
        std::to_string(cfg.frames_per_video) + " is not divisible by " +
        std::to_string(cfg.stored_frames_per_video));
  }

  const auto mode = parse_align_mode(cfg.alignment);
  if (!mode) {
    bad("key 'alignment': must be \"uniform\", \"repeated\" or \"none\"");
  } else if (*mode == AlignMode::kNone &&
             cfg.stored_frames_per_video != cfg.frames_per_video) {
    bad("key 'alignment': \"none\" requires stored_frames_per_video == "
        "frames_per_video");
  }

  if (cfg.budget_bytes_per_class < 0) {
    bad("key 'budget_bytes_per_class': must be >= 0");
  }
  if (cfg.base_epochs < 1) bad("key 'base_epochs': must be >= 1");
  if (cfg.finetune_epochs < 1) bad("key 'finetune_epochs': must be >= 1");
  if (cfg.batch_size < 1) bad("key 'batch_size': must be >= 1");
  if (cfg.learning_rate < 0.0) bad("key 'learning_rate': must be >= 0");
  if (cfg.lambda_distill < 0.0) bad("key 'lambda_distill': must be >= 0");
  if (cfg.distill_temperature <= 0.0) {
    bad("key 'distill_temperature': must be > 0");
  }

  ModelConfig mc;
  mc.in_channels = synthetic ? cfg.frame_channels : 3;
  mc.conv_channels = cfg.conv_channels;
  mc.shift_block = cfg.shift_block;
  mc.shift_fraction = cfg.shift_fraction;
  mc.head_init_scale = cfg.head_init_scale;
  try {
    mc.validate();
  } catch (const std::exception& e) {
    bad(std::string("model keys: ") + e.what());
  }
  if (synthetic) {
    const int pools = static_cast<int>(cfg.conv_channels.size()) - 1;
    if (cfg.frame_height >> pools < 1 || cfg.frame_width >> pools < 1) {
      bad("keys 'frame_height/frame_width': too small for " +
          std::to_string(pools) + " pooling stages");
    }
  }

  if (cfg.seeds.empty()) bad("key 'seeds': must be non-empty");
  if (cfg.output_dir.empty()) bad("key 'output_dir': must be non-empty");

  if (cfg.baseline_mode) {
    if (cfg.early_break) {
      bad("key 'baseline_mode': requires early_break=false");
    }
    if (cfg.stored_frames_per_video != cfg.frames_per_video) {
      bad("key 'baseline_mode': requires dense exemplars "
          "(stored_frames_per_video == frames_per_video)");
    }
  }
  return errors;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["dataset"] = cfg.dataset;
  j["num_classes"] = cfg.num_classes;
  j["samples_per_class"] = cfg.samples_per_class;
  j["test_samples_per_class"] = cfg.test_samples_per_class;
  j["frame_channels"] = cfg.frame_channels;
  j["frame_height"] = cfg.frame_height;
  j["frame_width"] = cfg.frame_width;
  j["dataset_seed"] = cfg.dataset_seed;
  j["frames_root"] = cfg.frames_root;
  j["test_fraction"] = cfg.test_fraction;
  j["initial_classes"] = cfg.initial_classes;
  j["classes_per_stage"] = cfg.classes_per_stage;
  j["frames_per_video"] = cfg.frames_per_video;
  j["stored_frames_per_video"] = cfg.stored_frames_per_video;
  j["alignment"] = cfg.alignment;
  j["budget_bytes_per_class"] = cfg.budget_bytes_per_class;
  j["quantize_exemplars"] = cfg.quantize_exemplars;
  j["base_epochs"] = cfg.base_epochs;
  j["finetune_epochs"] = cfg.finetune_epochs;
  j["batch_size"] = cfg.batch_size;
  j["learning_rate"] = cfg.learning_rate;
  j["lambda_distill"] = cfg.lambda_distill;
  j["distill_temperature"] = cfg.distill_temperature;
  j["conv_channels"] = cfg.conv_channels;
  j["shift_block"] = cfg.shift_block;
  j["shift_fraction"] = cfg.shift_fraction;
  j["head_init_scale"] = cfg.head_init_scale;
  j["seeds"] = cfg.seeds;
  j["output_dir"] = cfg.output_dir;
  j["sparse_inference"] = cfg.sparse_inference;
  j["early_break"] = cfg.early_break;
  j["baseline_mode"] = cfg.baseline_mode;
  return j.dump(2);
}

std::uint64_t config_fingerprint(const ExperimentConfig& cfg) {
  ExperimentConfig canon = cfg;
  canon.output_dir.clear();
  const std::string dump = config_to_json(canon);
  return fnv1a64(dump);
}

}  // namespace snro
