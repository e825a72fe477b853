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

#ifndef SNRO_DATASET_HPP
#define SNRO_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "snro/frame_sequence.hpp"

namespace snro {

/// Seeded class ordering split into per-task groups. Group 0 holds the
/// initial task's classes; groups 1..K the incremental tasks'.
struct TaskSchedule {
  std::vector<int> class_order;          // permutation of all class ids
  std::vector<std::vector<int>> groups;  // partition of class_order
  std::uint64_t seed = 0;

  int num_tasks() const { return static_cast<int>(groups.size()); }
  int num_classes() const { return static_cast<int>(class_order.size()); }
  /// Classes seen once task k (inclusive) is finished.
  int classes_seen(int task) const;
  /// Task index that introduced the class; -1 if unknown.
  int task_of_class(int class_id) const;
};

/// Seeded pseudo-random permutation of [0, num_classes) chunked into one
/// initial group plus equal incremental groups.
TaskSchedule make_schedule(int num_classes, int initial, int per_stage,
                           std::uint64_t seed);

/// Deterministic synthetic video classes: each class is a textured shape
/// translating with a class-specific velocity, so both appearance and
/// motion carry label information. Per-sample position/phase jitter.
/// Pure function of its arguments.
std::vector<FrameSequence> generate_synthetic_dataset(int num_classes,
                                                      int samples_per_class,
                                                      int t, int c, int h, int w,
                                                      std::uint64_t seed);

/// Ingest `root/<class>/<video>/<frame>.png|jpg`. Class ids follow the
/// lexicographic order of the class directory names. Videos are uniformly
/// subsampled to exactly `f` frames.
std::vector<FrameSequence> load_frame_directory(const std::filesystem::path& root,
                                                int f);

/// Class-directory names discovered by load_frame_directory, in id order.
std::vector<std::string> list_class_names(const std::filesystem::path& root);

/// Export sequences to the same layout (8-bit PNG frames). Supports C = 1
/// or C = 3. Channel order in memory is RGB.
void export_frame_directory(const std::vector<FrameSequence>& data,
                            const std::filesystem::path& root);

}  // namespace snro

#endif  // SNRO_DATASET_HPP
