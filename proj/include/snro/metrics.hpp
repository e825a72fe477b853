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

#ifndef SNRO_METRICS_HPP
#define SNRO_METRICS_HPP

#include <span>
#include <vector>

namespace snro {

/// Lower-triangular accuracy matrix a_{k,j}: row k holds the accuracies
/// (percent, 0-100) on the test sets of tasks j = 0..k, measured after
/// training task k. Tasks are indexed from 0 (task 0 = initial task).
class AccMatrix {
 public:
  AccMatrix() = default;

  int tasks() const { return static_cast<int>(rows_.size()); }

  /// Appends row k; must have exactly k+1 entries, all within [0, 100].
  void push_row(std::vector<double> row);

  double at(int k, int j) const;
  std::span<const double> row(int k) const;

  const std::vector<std::vector<double>>& rows() const { return rows_; }

 private:
  std::vector<std::vector<double>> rows_;
};

/// Mean of the defined entries of row k. Errors on an empty row.
double average_accuracy(std::span<const double> acc_row);

/// f_{k,j} = max_{l in j..k-1} a_{l,j} - a_{k,j}.  Requires j < k; may be
/// negative when accuracy on task j improved.
double forgetting(const AccMatrix& acc, int k, int j);

/// Mean of f_{k,j} over all j < k. Requires k >= 1.
double average_forgetting(const AccMatrix& acc, int k);

/// Accuracy matrix plus everything derivable from it.
struct RunMetrics {
  AccMatrix acc;
  std::vector<double> avg_accuracy;                 // ACC_k for every row k
  std::vector<std::vector<double>> forgetting_mat;  // row k: f_{k,j}, j < k
  std::vector<double> avg_forgetting;               // FOR_k, k >= 1 (entry 0 unused = NaN)

  static RunMetrics from_matrix(AccMatrix m);
  double final_avg_accuracy() const;
  double final_avg_forgetting() const;  // NaN for a single-task run
};

}  // namespace snro

#endif  // SNRO_METRICS_HPP
