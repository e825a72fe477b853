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

#include "snro/classify.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace snro {

namespace {

Eigen::VectorXd normalized(const Eigen::VectorXd& v) {
  const double n = v.norm();
  return n > 1e-12 ? Eigen::VectorXd(v / n) : v;
}

}  // namespace

FrameSequence SparseInference::apply(const FrameSequence& seq) const {
  if (!enabled) return seq;
  return align_frames(sparse_extract(seq, f_bar), f, mode);
}

double classify_cnn(const VideoNet& model,
                    std::span<const FrameSequence> test_set,
                    const std::map<int, int>& class_to_head,
                    const SparseInference& sparse, int batch_size) {
  if (test_set.empty()) {
    throw std::invalid_argument("classify_cnn: empty test set");
  }
  if (batch_size < 1) {
    throw std::invalid_argument("classify_cnn: batch_size must be >= 1");
  }
  for (const auto& seq : test_set) {
    auto it = class_to_head.find(seq.label);
    if (it == class_to_head.end() || it->second >= model.num_classes()) {
      throw std::invalid_argument("classify_cnn: label " +
                                  std::to_string(seq.label) +
                                  " not covered by the model head");
    }
  }

  std::size_t correct = 0;
  std::size_t pos = 0;
  while (pos < test_set.size()) {
    const std::size_t take =
        std::min<std::size_t>(batch_size, test_set.size() - pos);
    Batch batch;
    for (std::size_t i = 0; i < take; ++i) {
      const FrameSequence& seq = test_set[pos + i];
      batch_append(batch, sparse.apply(seq), class_to_head.at(seq.label));
    }
    const BatchLogits out = model.forward(batch);
    for (std::size_t i = 0; i < take; ++i) {
      Eigen::Index arg = 0;
      out.logits.row(static_cast<Eigen::Index>(i)).maxCoeff(&arg);
      if (static_cast<int>(arg) == batch.labels[i]) ++correct;
    }
    pos += take;
  }
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(test_set.size());
}

std::map<int, Eigen::VectorXd> nme_class_means(const VideoNet& model,
                                               const ExemplarStore& store,
                                               AlignMode mode) {
  std::map<int, Eigen::VectorXd> means;
  for (int cid : store.class_ids()) {
    const auto& bucket = store.exemplars(cid);
    if (bucket.empty()) continue;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(model.feature_dim());
    for (const auto& ex : bucket) {
      const FrameSequence aligned =
          align_frames(ex.to_sequence(store.f_bar()), store.f(), mode);
      sum += normalized(model.features_of(aligned));
    }
    means[cid] = normalized(Eigen::VectorXd(sum / static_cast<double>(bucket.size())));
  }
  return means;
}

double classify_nme(const VideoNet& model, const ExemplarStore& store,
                    std::span<const FrameSequence> test_set, AlignMode mode,
                    const SparseInference& sparse) {
  if (test_set.empty()) {
    throw std::invalid_argument("classify_nme: empty test set");
  }
  const std::map<int, Eigen::VectorXd> means = nme_class_means(model, store, mode);
  for (const auto& seq : test_set) {
    if (means.find(seq.label) == means.end()) {
      throw std::invalid_argument("classify_nme: class " +
                                  std::to_string(seq.label) +
                                  " has no exemplars in the store");
    }
  }

  std::size_t correct = 0;
  for (const auto& seq : test_set) {
    const Eigen::VectorXd feat =
        normalized(model.features_of(sparse.apply(seq)));
    int best_class = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& [cid, mean] : means) {  // ascending class id
      const double d = (feat - mean).squaredNorm();
      if (d < best_dist) {
        best_dist = d;
        best_class = cid;
      }
    }
    if (best_class == seq.label) ++correct;
  }
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(test_set.size());
}

}  // namespace snro
