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

#ifndef SNRO_FRAME_SEQUENCE_HPP
#define SNRO_FRAME_SEQUENCE_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace snro {

/// One video sample: T frames of shape (C, H, W), pixel values in [0, 1]
/// for dataset-produced sequences, plus class label and source id.
struct FrameSequence {
  int t = 0;
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<float> frames;  // layout [t][c][h][w]
  int label = -1;
  std::string source_id;

  std::size_t frame_elems() const {
    return static_cast<std::size_t>(c) * h * w;
  }
  std::size_t total_elems() const { return frame_elems() * t; }

  const float* frame_data(int frame) const {
    return frames.data() + static_cast<std::size_t>(frame) * frame_elems();
  }
  float* frame_data(int frame) {
    return frames.data() + static_cast<std::size_t>(frame) * frame_elems();
  }

  float at(int ti, int ci, int hi, int wi) const {
    return frames[((static_cast<std::size_t>(ti) * c + ci) * h + hi) * w + wi];
  }
  float& at(int ti, int ci, int hi, int wi) {
    return frames[((static_cast<std::size_t>(ti) * c + ci) * h + hi) * w + wi];
  }
};

/// Uniform temporal selection: indices floor(i*m/n) for i = 0..n-1.
/// Requires 1 <= n <= m.
std::vector<int> uniform_indices(int m, int n);

/// Throws std::invalid_argument if the sequence violates the dataset
/// invariants (T >= 1, consistent dims, finite pixels inside [0, 1]).
void validate_unit_range(const FrameSequence& seq);

}  // namespace snro

#endif  // SNRO_FRAME_SEQUENCE_HPP
