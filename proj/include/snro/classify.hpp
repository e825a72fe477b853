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

#ifndef SNRO_CLASSIFY_HPP
#define SNRO_CLASSIFY_HPP

#include <map>
#include <span>
#include <vector>

#include "snro/memory.hpp"
#include "snro/model.hpp"

namespace snro {

/// Test-time frame sparsification: when enabled, every test video is
/// sparse-extracted to f_bar and re-aligned to f before the forward pass.
struct SparseInference {
  bool enabled = false;
  int f = 0;
  int f_bar = 0;
  AlignMode mode = AlignMode::kRepeated;

  FrameSequence apply(const FrameSequence& seq) const;
};

/// Top-1 accuracy (percent) of the softmax head. class_to_head maps class
/// ids to head indices; every test label must be mapped.
double classify_cnn(const VideoNet& model,
                    std::span<const FrameSequence> test_set,
                    const std::map<int, int>& class_to_head,
                    const SparseInference& sparse, int batch_size = 16);

/// Nearest-mean-of-exemplars accuracy (percent): per-class means of
/// unit-normalized aligned-exemplar features, prediction by smallest
/// Euclidean distance on normalized features. Ties go to the smallest
/// class id. Every test label must have at least one exemplar.
double classify_nme(const VideoNet& model, const ExemplarStore& store,
                    std::span<const FrameSequence> test_set, AlignMode mode,
                    const SparseInference& sparse);

/// The per-class NME prototypes (exposed for testing against independent
/// centroid implementations).
std::map<int, Eigen::VectorXd> nme_class_means(const VideoNet& model,
                                               const ExemplarStore& store,
                                               AlignMode mode);

}  // namespace snro

#endif  // SNRO_CLASSIFY_HPP
