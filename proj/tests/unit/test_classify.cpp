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
#include <limits>

#include "snro/classify.hpp"
#include "snro/dataset.hpp"
#include "snro/rng.hpp"

using namespace snro;

namespace {

ModelConfig toy_config() {
  ModelConfig cfg;
  cfg.in_channels = 3;
  cfg.conv_channels = {4, 8};
  cfg.shift_block = 1;
  return cfg;
}

// Few-epoch SGD on the raw loss; enough to fit a tiny 2-class set.
void fit(VideoNet& net, const std::vector<FrameSequence>& data, int epochs,
         double lr) {
  for (int e = 0; e < epochs; ++e) {
    Batch batch;
    for (const auto& seq : data) batch_append(batch, seq, seq.label);
    const auto lg = net.training_loss_and_grad(batch, 0.0, 2.0);
    net.apply_gradient(lg.grad, lr);
  }
}

FrameSequence constant_video(float value, int label, const std::string& id) {
  FrameSequence s;
  s.t = 4;
  s.c = 3;
  s.h = 8;
  s.w = 8;
  s.label = label;
  s.source_id = id;
  s.frames.assign(s.total_elems(), value);
  return s;
}

std::map<int, int> identity_map(int n) {
  std::map<int, int> m;
  for (int i = 0; i < n; ++i) m[i] = i;
  return m;
}

}  // namespace

TEST_SUITE("classify") {

TEST_CASE("cnn classifier fits its own training exemplars") {
  auto data = generate_synthetic_dataset(2, 6, 4, 3, 8, 8, 31);
  VideoNet net(toy_config(), 41);
  net.expand_head(2);
  fit(net, data, 60, 0.2);
  const SparseInference off;
  const double acc = classify_cnn(net, data, identity_map(2), off);
  CHECK(acc >= 95.0);

  SUBCASE("repeated calls are identical") {
    CHECK(classify_cnn(net, data, identity_map(2), off) == acc);
  }

  SUBCASE("dense sparse-inference (f_bar = f) changes nothing") {
    SparseInference dense;
    dense.enabled = true;
    dense.f = 4;
    dense.f_bar = 4;
    dense.mode = AlignMode::kRepeated;
    CHECK(classify_cnn(net, data, identity_map(2), dense) == acc);
  }

  SUBCASE("sparse inference still classifies the toy set") {
    SparseInference sparse;
    sparse.enabled = true;
    sparse.f = 4;
    sparse.f_bar = 2;
    sparse.mode = AlignMode::kRepeated;
    const double sparse_acc = classify_cnn(net, data, identity_map(2), sparse);
    CHECK(sparse_acc >= 50.0);
  }
}

TEST_CASE("cnn classifier rejects labels outside the head") {
  auto data = generate_synthetic_dataset(2, 1, 4, 3, 8, 8, 32);
  VideoNet net(toy_config(), 42);
  net.expand_head(1);  // head narrower than the labels
  std::map<int, int> map{{0, 0}};
  const SparseInference off;
  CHECK_THROWS_AS(classify_cnn(net, data, map, off), std::invalid_argument);
}

TEST_CASE("nme separates trivially distinct classes") {
  std::vector<FrameSequence> train{constant_video(0.0f, 0, "z0"),
                                   constant_video(1.0f, 1, "o0")};
  VideoNet net(toy_config(), 43);
  net.expand_head(2);

  ExemplarStore store(4, 4, 3 * 8 * 8, 4LL * 3 * 8 * 8);
  store.build_memory_set(
      train, [&net](const FrameSequence& s) { return net.features_of(s); },
      {0, 1});

  const SparseInference off;
  const double acc =
      classify_nme(net, store, train, AlignMode::kNone, off);
  CHECK(acc == 100.0);
}

TEST_CASE("nme matches an independent nearest-centroid oracle") {
  auto data = generate_synthetic_dataset(3, 5, 4, 3, 8, 8, 33);
  VideoNet net(toy_config(), 44);
  net.expand_head(3);
  fit(net, data, 10, 0.1);

  ExemplarStore store(4, 2, 3 * 8 * 8, 3LL * 2 * 3 * 8 * 8);
  store.build_memory_set(
      data, [&net](const FrameSequence& s) { return net.features_of(s); },
      {0, 1, 2});
  auto test = generate_synthetic_dataset(3, 3, 4, 3, 8, 8, 34);

  const double acc =
      classify_nme(net, store, test, AlignMode::kUniform, SparseInference{});

  // independent recomputation with plain loops
  const auto means = nme_class_means(net, store, AlignMode::kUniform);
  int correct = 0;
  for (const auto& seq : test) {
    Eigen::VectorXd f = net.features_of(seq);
    const double n = std::sqrt(f.squaredNorm());
    if (n > 1e-12) f /= n;
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& [cid, mean] : means) {
      double d = 0.0;
      for (int q = 0; q < f.size(); ++q) {
        d += (f(q) - mean(q)) * (f(q) - mean(q));
      }
      if (d < best_d) {
        best_d = d;
        best = cid;
      }
    }
    if (best == seq.label) ++correct;
  }
  const double oracle_acc = 100.0 * correct / static_cast<double>(test.size());
  CHECK(acc == oracle_acc);
}

TEST_CASE("nme tie-break goes to the smallest class id") {
  // identical exemplar content for classes 2 and 5: identical means
  std::vector<FrameSequence> train{constant_video(0.6f, 2, "a"),
                                   constant_video(0.6f, 5, "b")};
  VideoNet net(toy_config(), 45);
  net.expand_head(6);
  ExemplarStore store(4, 4, 3 * 8 * 8, 4LL * 3 * 8 * 8);
  store.build_memory_set(
      train, [&net](const FrameSequence& s) { return net.features_of(s); },
      {2, 5});

  const SparseInference off;
  std::vector<FrameSequence> probe_small{constant_video(0.6f, 2, "p")};
  CHECK(classify_nme(net, store, probe_small, AlignMode::kNone, off) == 100.0);
  std::vector<FrameSequence> probe_large{constant_video(0.6f, 5, "q")};
  CHECK(classify_nme(net, store, probe_large, AlignMode::kNone, off) == 0.0);
}

TEST_CASE("nme errors name the class without exemplars") {
  std::vector<FrameSequence> train{constant_video(0.3f, 0, "a")};
  VideoNet net(toy_config(), 46);
  net.expand_head(2);
  ExemplarStore store(4, 4, 3 * 8 * 8, 4LL * 3 * 8 * 8);
  store.build_memory_set(
      train, [&net](const FrameSequence& s) { return net.features_of(s); },
      {0});
  std::vector<FrameSequence> test{constant_video(0.9f, 1, "t")};
  try {
    classify_nme(net, store, test, AlignMode::kNone, SparseInference{});
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("accuracy is invariant under class relabeling") {
  auto data = generate_synthetic_dataset(2, 4, 4, 3, 8, 8, 35);
  VideoNet net(toy_config(), 47);
  net.expand_head(2);
  fit(net, data, 15, 0.1);
  ExemplarStore store(4, 2, 3 * 8 * 8, 2LL * 2 * 3 * 8 * 8);
  store.build_memory_set(
      data, [&net](const FrameSequence& s) { return net.features_of(s); },
      {0, 1});
  auto test = generate_synthetic_dataset(2, 2, 4, 3, 8, 8, 36);
  const double before =
      classify_nme(net, store, test, AlignMode::kRepeated, SparseInference{});

  // swap ids 0 <-> 1 consistently in the store and the test labels
  std::vector<FrameSequence> swapped_data = data;
  for (auto& s : swapped_data) s.label = 1 - s.label;
  ExemplarStore swapped_store(4, 2, 3 * 8 * 8, 2LL * 2 * 3 * 8 * 8);
  swapped_store.build_memory_set(
      swapped_data,
      [&net](const FrameSequence& s) { return net.features_of(s); }, {0, 1});
  auto swapped_test = test;
  for (auto& s : swapped_test) s.label = 1 - s.label;
  const double after = classify_nme(net, swapped_store, swapped_test,
                                    AlignMode::kRepeated, SparseInference{});
  CHECK(before == after);
}

}  // TEST_SUITE
