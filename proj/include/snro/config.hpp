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

#ifndef SNRO_CONFIG_HPP
#define SNRO_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace snro {

/// Flat key/value experiment configuration. See docs/formats.md for the
/// schema; unknown keys are rejected.
struct ExperimentConfig {
  // dataset
  std::string dataset = "synthetic";  // "synthetic" | "frames"
  int num_classes = 10;
  int samples_per_class = 16;       // synthetic: train videos per class
  int test_samples_per_class = 8;   // synthetic: test videos per class
  int frame_channels = 3;
  int frame_height = 16;
  int frame_width = 16;
  std::uint64_t dataset_seed = 7;   // synthetic content; fixed across seeds
  std::string frames_root;          // frames: ingest root
  double test_fraction = 0.25;      // frames: per-class test split

  // schedule
  int initial_classes = 2;
  int classes_per_stage = 2;

  // frames / memory
  int frames_per_video = 8;         // F, network input length
  int stored_frames_per_video = 4;  // F_bar
  std::string alignment = "repeated";  // uniform | repeated | none
  std::int64_t budget_bytes_per_class = 0;
  bool quantize_exemplars = true;

  // stages
  int base_epochs = 50;  // N
  int finetune_epochs = 30;

  // optimizer / distillation
  int batch_size = 8;
  double learning_rate = 0.05;
  double lambda_distill = 1.0;
  double distill_temperature = 2.0;

  // model
  std::vector<int> conv_channels = {16, 32, 64};
  int shift_block = 1;
  double shift_fraction = 0.25;
  double head_init_scale = 1e-2;

  // run
  std::vector<std::uint64_t> seeds = {1000, 1993, 2021};
  std::string output_dir = "runs/out";
  bool sparse_inference = false;
  bool early_break = true;
  bool baseline_mode = false;  // dense exemplars, no early break
};

/// Parse a JSON config file. Parse/type errors land in `errors` with the
/// offending key named; on any error the returned config is unusable.
ExperimentConfig parse_config_file(const std::filesystem::path& path,
                                   std::vector<std::string>& errors);

/// Cross-field validation; returns one message per violated constraint.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

/// Canonical serialization (sorted keys) of every field.
std::string config_to_json(const ExperimentConfig& cfg);

/// Stable hash of the config content (excluding output_dir), used to
/// guard resumed runs.
std::uint64_t config_fingerprint(const ExperimentConfig& cfg);

}  // namespace snro

#endif  // SNRO_CONFIG_HPP
