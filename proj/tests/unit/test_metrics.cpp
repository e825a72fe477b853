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

#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <vector>

#include "snro/metrics.hpp"
#include "snro/rng.hpp"

using namespace snro;

namespace {

// Independent brute-force oracles, kept deliberately separate from the
// library implementations.
double oracle_mean(const std::vector<double>& row) {
  double s = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) s = s + row[i];
  return s / row.size();
}

double oracle_forgetting(const std::vector<std::vector<double>>& rows, int k,
                         int j) {
  double best = rows[j][j];
  for (int l = j; l <= k - 1; ++l) {
    if (rows[l][j] > best) best = rows[l][j];
  }
  return best - rows[k][j];
}

double oracle_avg_forgetting(const std::vector<std::vector<double>>& rows,
                             int k) {
  double s = 0.0;
  for (int j = 0; j < k; ++j) s += oracle_forgetting(rows, k, j);
  return s / k;
}

AccMatrix random_matrix(DetRng& rng, int tasks) {
  AccMatrix m;
  for (int k = 0; k < tasks; ++k) {
    std::vector<double> row(k + 1);
    for (auto& v : row) v = rng.uniform(0.0, 100.0);
    m.push_row(row);
  }
  return m;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("average accuracy on fixed rows") {
  CHECK(average_accuracy(std::vector<double>{100.0, 100.0}) == 100.0);
  CHECK(average_accuracy(std::vector<double>{80.0, 60.0}) == 70.0);
  CHECK_THROWS_AS(average_accuracy(std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("average accuracy matches summation oracle on a random row") {
  DetRng rng(42);
  std::vector<double> row(6);
  for (auto& v : row) v = rng.uniform(0.0, 100.0);
  CHECK(average_accuracy(row) == doctest::Approx(oracle_mean(row)).epsilon(1e-15));
}

TEST_CASE("forgetting on fixed values") {
  AccMatrix m;
  m.push_row({90.0});
  m.push_row({80.0, 80.0});
  m.push_row({80.0, 80.0, 60.0});
  // a_{1,1} = a_{2,1} = 80: no change on task 1
  CHECK(forgetting(m, 2, 1) == 0.0);

  AccMatrix d;
  d.push_row({90.0});
  d.push_row({80.0, 80.0});
  d.push_row({75.0, 70.0, 65.0});
  CHECK(forgetting(d, 2, 1) == 10.0);
  CHECK(forgetting(d, 2, 0) == 15.0);
  CHECK_THROWS_AS(forgetting(d, 1, 1), std::invalid_argument);
}

TEST_CASE("forgetting includes l = j in the max") {
  DetRng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    AccMatrix m = random_matrix(rng, 5);
    for (int k = 1; k < 5; ++k) {
      for (int j = 0; j < k; ++j) {
        CHECK(forgetting(m, k, j) >= m.at(j, j) - m.at(k, j) - 1e-12);
      }
    }
  }
}

TEST_CASE("average forgetting on fixed values") {
  AccMatrix m;
  m.push_row({80.0});
  m.push_row({70.0, 90.0});
  // sole term: f_{1,0} = 10
  CHECK(average_forgetting(m, 1) == 10.0);
  CHECK_THROWS_AS(average_forgetting(m, 0), std::invalid_argument);

  AccMatrix same;
  same.push_row({55.0});
  same.push_row({55.0, 60.0});
  same.push_row({55.0, 60.0, 70.0});
  CHECK(average_forgetting(same, 2) == 0.0);
}

TEST_CASE("metric oracle equivalence on random matrices") {
  DetRng rng(20210704);
  for (int rep = 0; rep < 100; ++rep) {
    const int tasks = 1 + static_cast<int>(rng.below(8));
    AccMatrix m = random_matrix(rng, tasks);
    const auto& rows = m.rows();
    for (int k = 0; k < tasks; ++k) {
      CHECK(std::abs(average_accuracy(m.row(k)) - oracle_mean(rows[k])) <=
            1e-12);
      for (int j = 0; j < k; ++j) {
        CHECK(std::abs(forgetting(m, k, j) - oracle_forgetting(rows, k, j)) <=
              1e-12);
      }
      if (k >= 1) {
        CHECK(std::abs(average_forgetting(m, k) -
                       oracle_avg_forgetting(rows, k)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("forgetting is shift invariant") {
  DetRng rng(99);
  AccMatrix m = random_matrix(rng, 6);
  const double c = 7.25;
  AccMatrix shifted;
  for (int k = 0; k < 6; ++k) {
    std::vector<double> row;
    for (int j = 0; j <= k; ++j) {
      // keep values inside [0,100]
      row.push_back(m.at(k, j) * 0.5 + c);
    }
    shifted.push_row(row);
  }
  // adding c (after identical scaling) leaves max-differences unchanged
  AccMatrix scaled;
  for (int k = 0; k < 6; ++k) {
    std::vector<double> row;
    for (int j = 0; j <= k; ++j) row.push_back(m.at(k, j) * 0.5);
    scaled.push_row(row);
  }
  for (int k = 1; k < 6; ++k) {
    for (int j = 0; j < k; ++j) {
      CHECK(forgetting(shifted, k, j) ==
            doctest::Approx(forgetting(scaled, k, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("metric functions are pure") {
  DetRng rng(5);
  AccMatrix m = random_matrix(rng, 4);
  const double a1 = average_forgetting(m, 3);
  const double a2 = average_forgetting(m, 3);
  CHECK(a1 == a2);
  RunMetrics r1 = RunMetrics::from_matrix(m);
  RunMetrics r2 = RunMetrics::from_matrix(m);
  CHECK(r1.avg_accuracy == r2.avg_accuracy);
  CHECK(r1.avg_forgetting[3] == r2.avg_forgetting[3]);
}

TEST_CASE("RunMetrics derives everything from the matrix") {
  AccMatrix m;
  m.push_row({90.0});
  m.push_row({85.0, 95.0});
  RunMetrics r = RunMetrics::from_matrix(m);
  CHECK(r.avg_accuracy[0] == 90.0);
  CHECK(r.avg_accuracy[1] == 90.0);
  CHECK(r.forgetting_mat[1][0] == 5.0);
  CHECK(r.final_avg_forgetting() == 5.0);
  CHECK(std::isnan(r.avg_forgetting[0]));
}

TEST_CASE("matrix shape is enforced") {
  AccMatrix m;
  m.push_row({50.0});
  CHECK_THROWS_AS(m.push_row({50.0}), std::invalid_argument);
  CHECK_THROWS_AS(m.push_row({50.0, 50.0, 50.0}), std::invalid_argument);
  CHECK_THROWS_AS(m.at(0, 1), std::out_of_range);
  AccMatrix bad;
  CHECK_THROWS_AS(bad.push_row({120.0}), std::invalid_argument);
}

}  // TEST_SUITE
