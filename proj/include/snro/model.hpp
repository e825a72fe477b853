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

#ifndef SNRO_MODEL_HPP
#define SNRO_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "snro/frame_sequence.hpp"

namespace snro {

/// Small video classifier: stacked 3x3 conv blocks (ReLU, 2x2 average
/// pooling between blocks) with one temporal-shift insertion, global
/// average pooling and a growable linear head. Trained with plain SGD.
struct ModelConfig {
  int in_channels = 3;
  std::vector<int> conv_channels = {16, 32, 64};
  int shift_block = 1;           // temporal shift applied to this block's input
  double shift_fraction = 0.25;  // of the block's input channels, each direction
  double head_init_scale = 1e-2;

  int feature_dim() const { return conv_channels.back(); }
  void validate() const;  // throws std::invalid_argument
};

/// Training/eval batch. x layout: [b][t][c][h][w], values as doubles.
struct Batch {
  int b = 0, t = 0, c = 0, h = 0, w = 0;
  std::vector<double> x;
  std::vector<int> labels;  // head indices, -1 allowed for unlabeled eval

  std::size_t sample_elems() const {
    return static_cast<std::size_t>(t) * c * h * w;
  }
};

/// Append one sequence to a batch (converts float frames to double).
void batch_append(Batch& batch, const FrameSequence& seq, int head_label);

struct BatchLogits {
  Eigen::MatrixXd logits;    // (batch, num_classes)
  Eigen::MatrixXd features;  // (batch, feature_dim), pre-head embedding
};

/// First floor(C*shift_fraction) channels move one step forward in time,
/// the next equal block one step backward; vacated frames are zero-filled
/// and the remaining channels pass through unchanged.
std::vector<double> temporal_shift(const std::vector<double>& x, int b, int t,
                                   int c, int h, int w, double shift_fraction);

class VideoNet {
 public:
  VideoNet(ModelConfig cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  int num_classes() const { return num_classes_; }
  int feature_dim() const { return cfg_.feature_dim(); }
  std::size_t param_count() const { return theta_.size(); }

  /// Widen the head by new_classes rows; existing rows are bit-preserved,
  /// new weights get small seeded zero-mean noise, new biases are zero.
  void expand_head(int new_classes);

  BatchLogits forward(const Batch& batch) const;
  Eigen::VectorXd features_of(const FrameSequence& seq) const;

  /// Cross-entropy over the current head plus lambda * temperature-scaled
  /// KL between snapshot and current logits on the snapshot's classes.
  double training_loss(const Batch& batch, double lambda_distill,
                       double temperature) const;
  struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
    Eigen::MatrixXd logits;  // pre-step logits, for batch accuracy
  };
  LossGrad training_loss_and_grad(const Batch& batch, double lambda_distill,
                                  double temperature) const;

  void apply_gradient(const std::vector<double>& grad, double learning_rate);

  /// Freeze the current parameters as the distillation reference.
  void set_snapshot();
  bool has_snapshot() const { return snapshot_.has_value(); }
  int snapshot_classes() const;
  std::uint64_t snapshot_hash() const;

  const std::vector<double>& parameters() const { return theta_; }
  std::vector<double>& mutable_parameters() { return theta_; }
  std::uint64_t param_hash() const;

  /// Checkpoint: <stem>.json manifest + <stem>.bin little-endian blob.
  void save(const std::filesystem::path& stem) const;
  static VideoNet load(const std::filesystem::path& stem);

 private:
  struct ForwardCache;
  void forward_impl(const std::vector<double>& theta, int num_classes,
                    const Batch& batch, ForwardCache* cache,
                    Eigen::MatrixXd& logits, Eigen::MatrixXd& features) const;
  void backward_impl(const Batch& batch, const ForwardCache& cache,
                     const Eigen::MatrixXd& dlogits,
                     std::vector<double>& grad) const;
  double loss_terms(const Batch& batch, const Eigen::MatrixXd& logits,
                    double lambda_distill, double temperature,
                    Eigen::MatrixXd* dlogits) const;

  // Parameter layout offsets into theta_.
  std::size_t conv_w_off(int block) const;
  std::size_t conv_b_off(int block) const;
  std::size_t head_w_off() const;
  std::size_t head_b_off() const;
  std::size_t backbone_params() const;

  ModelConfig cfg_;
  std::uint64_t seed_ = 0;
  int num_classes_ = 0;
  std::vector<double> theta_;

  struct Snapshot {
    std::vector<double> theta;
    int num_classes = 0;
  };
  std::optional<Snapshot> snapshot_;
};

}  // namespace snro

#endif  // SNRO_MODEL_HPP
