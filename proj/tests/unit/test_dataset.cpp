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
#include <Eigen/Dense>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "snro/dataset.hpp"

using namespace snro;
namespace fs = std::filesystem;

namespace {

// Ridge-regression one-vs-all probe on mean-pooled pixels. Test-only
// oracle, independent of the backbone.
double linear_probe_accuracy(const std::vector<FrameSequence>& data,
                             int num_classes) {
  const int n = static_cast<int>(data.size());
  const int c = data.front().c;
  Eigen::MatrixXd x(n, c + 1);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, num_classes);
  for (int i = 0; i < n; ++i) {
    const auto& seq = data[i];
    const std::size_t plane = static_cast<std::size_t>(seq.h) * seq.w;
    for (int ch = 0; ch < c; ++ch) {
      double sum = 0.0;
      for (int t = 0; t < seq.t; ++t) {
        const float* p = seq.frame_data(t) + ch * plane;
        for (std::size_t q = 0; q < plane; ++q) sum += p[q];
      }
      x(i, ch) = sum / (seq.t * static_cast<double>(plane));
    }
    x(i, c) = 1.0;
    y(i, seq.label) = 1.0;
  }
  const Eigen::MatrixXd gram =
      x.transpose() * x + 1e-6 * Eigen::MatrixXd::Identity(c + 1, c + 1);
  const Eigen::MatrixXd w = gram.ldlt().solve(x.transpose() * y);
  const Eigen::MatrixXd scores = x * w;
  int correct = 0;
  for (int i = 0; i < n; ++i) {
    Eigen::Index arg = 0;
    scores.row(i).maxCoeff(&arg);
    if (static_cast<int>(arg) == data[i].label) ++correct;
  }
  return static_cast<double>(correct) / n;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("uniform indices follow the floor rule") {
  CHECK(uniform_indices(16, 8) ==
        std::vector<int>{0, 2, 4, 6, 8, 10, 12, 14});
  CHECK(uniform_indices(8, 8) == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(uniform_indices(7, 3) == std::vector<int>{0, 2, 4});
  // by construction: floor(i*m/n)
  for (int m = 1; m <= 12; ++m) {
    for (int n = 1; n <= m; ++n) {
      const auto idx = uniform_indices(m, n);
      for (int i = 0; i < n; ++i) CHECK(idx[i] == i * m / n);
    }
  }
  CHECK_THROWS_AS(uniform_indices(4, 5), std::invalid_argument);
}

TEST_CASE("schedule splits classes into the configured groups") {
  const TaskSchedule s = make_schedule(101, 51, 10, 1000);
  REQUIRE(s.num_tasks() == 6);
  CHECK(s.groups[0].size() == 51);
  for (int k = 1; k < 6; ++k) CHECK(s.groups[k].size() == 10);
  CHECK(s.classes_seen(0) == 51);
  CHECK(s.classes_seen(5) == 101);
}

TEST_CASE("schedule groups partition the class set") {
  const TaskSchedule s = make_schedule(10, 2, 2, 0);
  REQUIRE(s.num_tasks() == 5);
  std::set<int> seen;
  for (const auto& g : s.groups) {
    for (int c : g) {
      CHECK(!seen.count(c));
      seen.insert(c);
    }
  }
  std::set<int> expect;
  for (int i = 0; i < 10; ++i) expect.insert(i);
  CHECK(seen == expect);
  for (int c = 0; c < 10; ++c) {
    const int task = s.task_of_class(c);
    CHECK(task >= 0);
    CHECK(std::find(s.groups[task].begin(), s.groups[task].end(), c) !=
          s.groups[task].end());
  }
}

TEST_CASE("schedule is deterministic per seed and varies across seeds") {
  const TaskSchedule a = make_schedule(20, 10, 5, 1993);
  const TaskSchedule b = make_schedule(20, 10, 5, 1993);
  CHECK(a.class_order == b.class_order);
  const TaskSchedule c = make_schedule(20, 10, 5, 2021);
  CHECK(a.class_order != c.class_order);
}

TEST_CASE("schedule rejects a non-divisible remainder") {
  CHECK_THROWS_AS(make_schedule(10, 3, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_schedule(10, 0, 2, 0), std::invalid_argument);
}

TEST_CASE("synthetic shape contract") {
  const auto data = generate_synthetic_dataset(2, 1, 4, 3, 16, 16, 7);
  REQUIRE(data.size() == 2);
  std::set<int> labels;
  for (const auto& seq : data) {
    CHECK(seq.t == 4);
    CHECK(seq.c == 3);
    CHECK(seq.h == 16);
    CHECK(seq.w == 16);
    CHECK(seq.frames.size() == seq.total_elems());
    labels.insert(seq.label);
    CHECK_NOTHROW(validate_unit_range(seq));
  }
  CHECK(labels == std::set<int>{0, 1});
}

TEST_CASE("synthetic generation is a pure function of its arguments") {
  const auto a = generate_synthetic_dataset(3, 2, 4, 3, 8, 8, 7);
  const auto b = generate_synthetic_dataset(3, 2, 4, 3, 8, 8, 7);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].frames == b[i].frames);
    CHECK(a[i].source_id == b[i].source_id);
  }
  const auto c = generate_synthetic_dataset(3, 2, 4, 3, 8, 8, 8);
  CHECK(a[0].frames != c[0].frames);
}

TEST_CASE("synthetic rejects invalid dimensions") {
  CHECK_THROWS_AS(generate_synthetic_dataset(1, 1, 4, 3, 8, 8, 7),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_synthetic_dataset(2, 0, 4, 3, 8, 8, 7),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_synthetic_dataset(2, 1, 0, 3, 8, 8, 7),
                  std::invalid_argument);
}

TEST_CASE("linear probe separates synthetic classes above chance") {
  const auto data = generate_synthetic_dataset(10, 20, 8, 3, 32, 32, 1000);
  REQUIRE(data.size() == 200);
  const double acc = linear_probe_accuracy(data, 10);
  // chance is 0.10
  CHECK(acc >= 0.2);
}

TEST_CASE("frame directory round-trip") {
  const auto data = generate_synthetic_dataset(2, 2, 4, 3, 8, 8, 99);
  const fs::path root = fs::temp_directory_path() / "snro_frames_rt";
  fs::remove_all(root);
  export_frame_directory(data, root);

  CHECK(list_class_names(root) ==
        std::vector<std::string>{"class_0000", "class_0001"});

  const auto loaded = load_frame_directory(root, 4);
  REQUIRE(loaded.size() == data.size());
  // loader walks classes and videos in sorted order; the generator emits
  // them in the same order
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].label == data[i].label);
    CHECK(loaded[i].t == 4);
    REQUIRE(loaded[i].frames.size() == data[i].frames.size());
    for (std::size_t p = 0; p < data[i].frames.size(); ++p) {
      CHECK(std::abs(loaded[i].frames[p] - data[i].frames[p]) <=
            0.5f / 255.0f + 1e-6f);
    }
  }
  fs::remove_all(root);
}

TEST_CASE("loader subsamples longer videos uniformly") {
  const auto data = generate_synthetic_dataset(2, 1, 8, 1, 6, 6, 5);
  const fs::path root = fs::temp_directory_path() / "snro_frames_sub";
  fs::remove_all(root);
  export_frame_directory(data, root);
  const auto loaded = load_frame_directory(root, 4);
  REQUIRE(loaded.size() == 2);
  const std::size_t fe = data[0].frame_elems();
  for (int i = 0; i < 4; ++i) {
    // every 2nd frame
    const float* got = loaded[0].frame_data(i);
    const float* want = data[0].frame_data(2 * i);
    for (std::size_t p = 0; p < fe; ++p) {
      CHECK(std::abs(got[p] - want[p]) <= 0.5f / 255.0f + 1e-6f);
    }
  }
  CHECK_THROWS_AS(load_frame_directory(root, 9), std::runtime_error);
  fs::remove_all(root);
}

TEST_CASE("loader errors name the offending entry") {
  const fs::path root = fs::temp_directory_path() / "snro_frames_err";
  fs::remove_all(root);

  SUBCASE("empty class directory") {
    fs::create_directories(root / "classA");
    try {
      load_frame_directory(root, 4);
      FAIL("expected an error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("classA") != std::string::npos);
    }
  }

  SUBCASE("undecodable frame") {
    fs::create_directories(root / "classA" / "vid0");
    std::ofstream(root / "classA" / "vid0" / "frame_0000.png") << "not a png";
    try {
      load_frame_directory(root, 1);
      FAIL("expected an error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("frame_0000.png") != std::string::npos);
    }
  }

  SUBCASE("missing root") {
    CHECK_THROWS_AS(load_frame_directory(root / "nope", 4),
                    std::runtime_error);
  }
  fs::remove_all(root);
}

}  // TEST_SUITE
