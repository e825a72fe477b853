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

#ifndef SNRO_MEMORY_HPP
#define SNRO_MEMORY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snro/frame_sequence.hpp"

namespace snro {

enum class AlignMode { kUniform, kRepeated, kNone };

const char* align_mode_name(AlignMode m);
std::optional<AlignMode> parse_align_mode(const std::string& name);

/// iCaRL-style greedy herding: at each step pick the candidate whose
/// inclusion keeps the running mean of selected features closest to
/// class_mean (L2). Ties resolve to the smallest original index.
/// Returns min(m, n) unique indices in selection order.
std::vector<int> herding_select(const Eigen::MatrixXd& features,
                                const Eigen::VectorXd& class_mean, int m);

/// Keep f_bar uniformly spaced frames (indices floor(i*T/f_bar)).
FrameSequence sparse_extract(const FrameSequence& video, int f_bar);

/// Expand a sparse sequence back to f frames by linear interpolation
/// between consecutive stored frames; the tail past the last stored frame
/// repeats that frame. Requires f divisible by the stored frame count.
FrameSequence align_uniform(const FrameSequence& sparse, int f);

/// Expand by repeating each stored frame f / T times in order.
FrameSequence align_repeated(const FrameSequence& sparse, int f);

/// Dispatch on mode; kNone requires the sequence to already have f frames.
FrameSequence align_frames(const FrameSequence& sparse, int f, AlignMode mode);

/// One stored exemplar: frames quantized to one byte per channel value
/// (or kept as floats when quantization is off). T = f_bar.
struct StoredExemplar {
  std::string source_id;
  int label = -1;
  int c = 0, h = 0, w = 0;
  std::vector<int> frame_indices;   // indices into the source video
  std::vector<std::uint8_t> data;   // quantized, f_bar * c*h*w bytes
  std::vector<float> data_f32;      // used instead of `data` when not quantized

  FrameSequence to_sequence(int f_bar) const;
};

struct MemoryBuildReport {
  std::map<int, int> stored_per_class;
  std::vector<std::string> warnings;
};

/// Per-class sparse exemplar sequences plus the byte-budget ledger.
/// frame_bytes is fixed at C*H*W (one byte per channel value); capacity
/// per class is floor(budget / (f_bar * frame_bytes)).
class ExemplarStore {
 public:
  ExemplarStore() = default;
  ExemplarStore(int f, int f_bar, std::int64_t frame_bytes,
                std::int64_t budget_per_class, bool quantize = true);

  int f() const { return f_; }
  int f_bar() const { return f_bar_; }
  std::int64_t frame_bytes() const { return frame_bytes_; }
  std::int64_t budget_per_class() const { return budget_per_class_; }
  bool quantized() const { return quantize_; }

  /// Max videos storable per class under the byte budget.
  std::int64_t capacity_per_class() const;

  bool empty() const { return per_class_.empty(); }
  bool has_class(int class_id) const;
  std::vector<int> class_ids() const;
  const std::vector<StoredExemplar>& exemplars(int class_id) const;
  std::int64_t class_bytes(int class_id) const;
  std::size_t total_exemplars() const;

  /// Herding-orders the candidates of each listed class by the given
  /// feature extractor, sparse-extracts the winners and stores as many as
  /// fit the budget. Classes must not already be present.
  MemoryBuildReport build_memory_set(
      const std::vector<FrameSequence>& task_data,
      const std::function<Eigen::VectorXd(const FrameSequence&)>& features_fn,
      const std::vector<int>& class_ids);

  /// Directory serialization: store.json + per-class manifest and frame
  /// blobs. Layout is versioned; see docs/formats.md.
  void save(const std::filesystem::path& dir) const;
  static ExemplarStore load(const std::filesystem::path& dir);

 private:
  void check_budget_invariant(int class_id) const;

  int f_ = 0;
  int f_bar_ = 0;
  std::int64_t frame_bytes_ = 0;
  std::int64_t budget_per_class_ = 0;
  bool quantize_ = true;
  std::map<int, std::vector<StoredExemplar>> per_class_;
};

/// Read view over a store with every exemplar aligned back to F frames.
/// Construction materializes the aligned sequences once; epoch orders are
/// generated per call from an explicit rng key.
class ReplayBuffer {
 public:
  ReplayBuffer(const ExemplarStore& store, AlignMode mode);

  std::size_t size() const { return sequences_.size(); }
  const FrameSequence& sequence(std::size_t i) const { return sequences_[i]; }
  int class_id(std::size_t i) const { return sequences_[i].label; }

  /// Unbalanced: every exemplar exactly once, shuffled.
  /// Balanced: every class contributes max-class-count samples per epoch
  /// (smaller classes are padded by re-drawing their own exemplars).
  std::vector<std::size_t> epoch_order(std::uint64_t rng_key,
                                       bool balanced) const;

 private:
  std::vector<FrameSequence> sequences_;
  std::map<int, std::vector<std::size_t>> by_class_;
};

}  // namespace snro

#endif  // SNRO_MEMORY_HPP
