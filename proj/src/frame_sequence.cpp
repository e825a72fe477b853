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

#include "snro/frame_sequence.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace snro {

std::vector<int> uniform_indices(int m, int n) {
  if (n < 1) throw std::invalid_argument("uniform_indices: n must be >= 1");
  if (n > m) {
    throw std::invalid_argument("uniform_indices: cannot select " +
                                std::to_string(n) + " frames from " +
                                std::to_string(m));
  }
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) {
    idx[i] = static_cast<int>(static_cast<long long>(i) * m / n);
  }
  return idx;
}

void validate_unit_range(const FrameSequence& seq) {
  if (seq.t < 1 || seq.c < 1 || seq.h < 1 || seq.w < 1) {
    throw std::invalid_argument("frame sequence '" + seq.source_id +
                                "': dimensions must be >= 1");
  }
  if (seq.frames.size() != seq.total_elems()) {
    throw std::invalid_argument("frame sequence '" + seq.source_id +
                                "': buffer size does not match dims");
  }
  if (seq.label < 0) {
    throw std::invalid_argument("frame sequence '" + seq.source_id +
                                "': label must be >= 0");
  }
  for (float v : seq.frames) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
      throw std::invalid_argument("frame sequence '" + seq.source_id +
                                  "': pixel value outside [0, 1]");
    }
  }
}

}  // namespace snro
