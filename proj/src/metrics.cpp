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

#include "snro/metrics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace snro {

void AccMatrix::push_row(std::vector<double> row) {
  const std::size_t expected = rows_.size() + 1;
  if (row.size() != expected) {
    throw std::invalid_argument(
        "AccMatrix: row " + std::to_string(rows_.size()) + " must have " +
        std::to_string(expected) + " entries, got " + std::to_string(row.size()));
  }
  for (double v : row) {
    if (!(v >= 0.0 && v <= 100.0)) {
      throw std::invalid_argument("AccMatrix: accuracy outside [0, 100]");
    }
  }
  rows_.push_back(std::move(row));
}

double AccMatrix::at(int k, int j) const {
  if (k < 0 || k >= tasks() || j < 0 || j > k) {
    throw std::out_of_range("AccMatrix: a_{" + std::to_string(k) + "," +
                            std::to_string(j) + "} is not defined");
  }
  return rows_[k][j];
}

std::span<const double> AccMatrix::row(int k) const {
  if (k < 0 || k >= tasks()) {
    throw std::out_of_range("AccMatrix: row " + std::to_string(k));
  }
  return rows_[k];
}

double average_accuracy(std::span<const double> acc_row) {
  if (acc_row.empty()) {
    throw std::invalid_argument("average_accuracy: empty accuracy row");
  }
  double sum = 0.0;
  for (double v : acc_row) sum += v;
  return sum / static_cast<double>(acc_row.size());
}

double forgetting(const AccMatrix& acc, int k, int j) {
  if (j >= k) {
    throw std::invalid_argument("forgetting: requires j < k, got k=" +
                                std::to_string(k) + " j=" + std::to_string(j));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (int l = j; l <= k - 1; ++l) best = std::max(best, acc.at(l, j));
  return best - acc.at(k, j);
}

double average_forgetting(const AccMatrix& acc, int k) {
  if (k < 1) {
    throw std::invalid_argument("average_forgetting: undefined for k=" +
                                std::to_string(k));
  }
  double sum = 0.0;
  for (int j = 0; j < k; ++j) sum += forgetting(acc, k, j);
  return sum / static_cast<double>(k);
}

RunMetrics RunMetrics::from_matrix(AccMatrix m) {
  RunMetrics out;
  out.acc = std::move(m);
  const int n = out.acc.tasks();
  out.avg_accuracy.resize(n);
  out.forgetting_mat.resize(n);
  out.avg_forgetting.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (int k = 0; k < n; ++k) {
    out.avg_accuracy[k] = average_accuracy(out.acc.row(k));
    out.forgetting_mat[k].resize(k);
    for (int j = 0; j < k; ++j) {
      out.forgetting_mat[k][j] = forgetting(out.acc, k, j);
    }
    if (k >= 1) out.avg_forgetting[k] = average_forgetting(out.acc, k);
  }
  return out;
}

double RunMetrics::final_avg_accuracy() const {
  if (avg_accuracy.empty()) {
    throw std::logic_error("RunMetrics: no tasks recorded");
  }
  return avg_accuracy.back();
}

double RunMetrics::final_avg_forgetting() const {
  if (avg_forgetting.empty()) {
    throw std::logic_error("RunMetrics: no tasks recorded");
  }
  return avg_forgetting.back();
}

}  // namespace snro
