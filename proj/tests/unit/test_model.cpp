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
#include <filesystem>

#include "snro/model.hpp"
#include "snro/rng.hpp"

using namespace snro;

namespace {

std::vector<double> random_tensor(DetRng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform();
  return v;
}

Batch random_batch(DetRng& rng, int b, int t, int c, int h, int w,
                   int num_classes) {
  Batch batch;
  batch.b = b;
  batch.t = t;
  batch.c = c;
  batch.h = h;
  batch.w = w;
  batch.x = random_tensor(rng, static_cast<std::size_t>(b) * t * c * h * w);
  for (int i = 0; i < b; ++i) {
    batch.labels.push_back(static_cast<int>(rng.below(num_classes)));
  }
  return batch;
}

ModelConfig tiny_config(int in_c = 2) {
  ModelConfig cfg;
  cfg.in_channels = in_c;
  cfg.conv_channels = {4, 6};
  cfg.shift_block = 1;
  cfg.shift_fraction = 0.25;
  return cfg;
}

double sum_block(const std::vector<double>& x, int b, int t, int c, int h,
                 int w, int c_lo, int c_hi) {
  double s = 0.0;
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const std::size_t frame = static_cast<std::size_t>(c) * plane;
  for (int bi = 0; bi < b; ++bi) {
    for (int ti = 0; ti < t; ++ti) {
      for (int ci = c_lo; ci < c_hi; ++ci) {
        const double* p =
            x.data() + (static_cast<std::size_t>(bi) * t + ti) * frame +
            ci * plane;
        for (std::size_t q = 0; q < plane; ++q) s += p[q];
      }
    }
  }
  return s;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("temporal shift with a single frame zeroes the shifted blocks") {
  DetRng rng(1);
  const int c = 8;
  const auto x = random_tensor(rng, 1 * 1 * c * 3 * 3);
  const auto y =
      temporal_shift(std::vector<double>(x), 1, 1, c, 3, 3, 0.25);
  const int k = 2;  // floor(8 * 0.25)
  for (int ci = 0; ci < c; ++ci) {
    for (int q = 0; q < 9; ++q) {
      const double got = y[static_cast<std::size_t>(ci) * 9 + q];
      const double want = ci < 2 * k ? 0.0 : x[static_cast<std::size_t>(ci) * 9 + q];
      CHECK(got == want);
    }
  }
}

TEST_CASE("temporal shift keeps unshifted channels intact on constant input") {
  const int b = 1, t = 3, c = 4, h = 2, w = 2;
  std::vector<double> x(static_cast<std::size_t>(b) * t * c * h * w);
  // constant over time, distinct per channel
  for (int ti = 0; ti < t; ++ti) {
    for (int ci = 0; ci < c; ++ci) {
      for (int q = 0; q < h * w; ++q) {
        x[(static_cast<std::size_t>(ti) * c + ci) * h * w + q] = ci + 1.0;
      }
    }
  }
  const auto y = temporal_shift(std::vector<double>(x), b, t, c, h, w, 0.25);
  // k = 1: channels 0 and 1 shift, channels 2..3 are untouched
  for (int ti = 0; ti < t; ++ti) {
    for (int ci = 2; ci < c; ++ci) {
      for (int q = 0; q < h * w; ++q) {
        CHECK(y[(static_cast<std::size_t>(ti) * c + ci) * h * w + q] ==
              ci + 1.0);
      }
    }
  }
}

TEST_CASE("temporal shift drops exactly the boundary frames") {
  DetRng rng(22);
  const int b = 2, t = 3, c = 8, h = 4, w = 4;
  const auto x = random_tensor(rng, static_cast<std::size_t>(b) * t * c * h * w);
  const auto y = temporal_shift(std::vector<double>(x), b, t, c, h, w, 0.25);
  const int k = 2;

  // forward block: everything except the last source frame survives
  double src_fwd = 0.0, src_bwd = 0.0;
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const std::size_t frame = static_cast<std::size_t>(c) * plane;
  for (int bi = 0; bi < b; ++bi) {
    for (int ti = 0; ti < t; ++ti) {
      for (int ci = 0; ci < k; ++ci) {
        if (ti < t - 1) {
          const double* p = x.data() +
                            (static_cast<std::size_t>(bi) * t + ti) * frame +
                            ci * plane;
          for (std::size_t q = 0; q < plane; ++q) src_fwd += p[q];
        }
      }
      for (int ci = k; ci < 2 * k; ++ci) {
        if (ti > 0) {
          const double* p = x.data() +
                            (static_cast<std::size_t>(bi) * t + ti) * frame +
                            ci * plane;
          for (std::size_t q = 0; q < plane; ++q) src_bwd += p[q];
        }
      }
    }
  }
  CHECK(sum_block(y, b, t, c, h, w, 0, k) == doctest::Approx(src_fwd).epsilon(1e-12));
  CHECK(sum_block(y, b, t, c, h, w, k, 2 * k) ==
        doctest::Approx(src_bwd).epsilon(1e-12));
  CHECK(sum_block(y, b, t, c, h, w, 2 * k, c) ==
        doctest::Approx(sum_block(x, b, t, c, h, w, 2 * k, c)).epsilon(1e-12));
}

TEST_CASE("temporal shift is linear") {
  DetRng rng(33);
  const int b = 1, t = 4, c = 4, h = 3, w = 3;
  const std::size_t n = static_cast<std::size_t>(b) * t * c * h * w;
  const auto x = random_tensor(rng, n);
  const auto y = random_tensor(rng, n);
  const double a = 1.7, bb = -0.6;
  std::vector<double> combo(n);
  for (std::size_t i = 0; i < n; ++i) combo[i] = a * x[i] + bb * y[i];
  const auto sx = temporal_shift(x, b, t, c, h, w, 0.25);
  const auto sy = temporal_shift(y, b, t, c, h, w, 0.25);
  const auto sc = temporal_shift(combo, b, t, c, h, w, 0.25);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(sc[i] == doctest::Approx(a * sx[i] + bb * sy[i]).epsilon(1e-12));
  }
}

TEST_CASE("temporal shift validates its arguments") {
  std::vector<double> x(1 * 2 * 4 * 2 * 2);
  CHECK_THROWS_AS(temporal_shift(x, 1, 2, 4, 2, 2, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(temporal_shift(x, 1, 2, 4, 2, 2, 0.6),
                  std::invalid_argument);
  // floor(2 * 0.25) = 0
  std::vector<double> small(1 * 2 * 2 * 2 * 2);
  CHECK_THROWS_AS(temporal_shift(small, 1, 2, 2, 2, 2, 0.25),
                  std::invalid_argument);
}

TEST_CASE("forward produces finite logits of the right shape") {
  VideoNet net(tiny_config(), 11);
  net.expand_head(5);
  DetRng rng(2);
  const Batch batch = random_batch(rng, 1, 2, 2, 8, 8, 5);
  const BatchLogits out = net.forward(batch);
  CHECK(out.logits.rows() == 1);
  CHECK(out.logits.cols() == 5);
  CHECK(out.features.rows() == 1);
  CHECK(out.features.cols() == net.feature_dim());
  CHECK(out.logits.allFinite());
  CHECK(out.features.allFinite());
}

TEST_CASE("forward is deterministic for duplicated rows") {
  VideoNet net(tiny_config(), 3);
  net.expand_head(4);
  DetRng rng(3);
  Batch one = random_batch(rng, 1, 2, 2, 8, 8, 4);
  Batch two = one;
  for (double v : one.x) two.x.push_back(v);
  two.labels.push_back(one.labels[0]);
  two.b = 2;
  const BatchLogits out = net.forward(two);
  CHECK(out.logits.row(0) == out.logits.row(1));
}

TEST_CASE("forward rejects mismatched dims") {
  VideoNet net(tiny_config(), 4);
  net.expand_head(2);
  DetRng rng(4);
  Batch batch = random_batch(rng, 1, 2, 3, 8, 8, 2);  // 3 channels, model has 2
  CHECK_THROWS_AS(net.forward(batch), std::invalid_argument);
}

TEST_CASE("expand_head preserves old logits and rejects zero growth") {
  VideoNet net(tiny_config(), 5);
  net.expand_head(5);
  DetRng rng(5);
  const Batch batch = random_batch(rng, 2, 2, 2, 8, 8, 5);
  const Eigen::MatrixXd before = net.forward(batch).logits;
  net.expand_head(5);
  CHECK(net.num_classes() == 10);
  const Eigen::MatrixXd after = net.forward(batch).logits;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 5; ++j) {
      CHECK(after(i, j) == before(i, j));  // bit-preserved
    }
  }
  CHECK_THROWS_AS(net.expand_head(0), std::invalid_argument);

  VideoNet twice(tiny_config(), 6);
  twice.expand_head(2);
  twice.expand_head(2);
  VideoNet once(tiny_config(), 6);
  once.expand_head(4);
  CHECK(twice.num_classes() == once.num_classes());
}

TEST_CASE("training loss identities") {
  VideoNet net(tiny_config(), 7);
  net.expand_head(3);
  DetRng rng(6);
  const Batch batch = random_batch(rng, 3, 2, 2, 8, 8, 3);

  SUBCASE("lambda 0 equals plain cross-entropy") {
    const double l0 = net.training_loss(batch, 0.0, 2.0);
    // manual cross-entropy from the logits
    const BatchLogits out = net.forward(batch);
    double ce = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Eigen::RowVectorXd z = out.logits.row(i);
      const double m = z.maxCoeff();
      const double lse = m + std::log((z.array() - m).exp().sum());
      ce += lse - z(batch.labels[i]);
    }
    CHECK(l0 == doctest::Approx(ce / 3).epsilon(1e-12));
  }

  SUBCASE("distillation vanishes when the model equals its snapshot") {
    net.set_snapshot();
    const double with = net.training_loss(batch, 1.0, 2.0);
    const double without = net.training_loss(batch, 0.0, 2.0);
    CHECK(with == doctest::Approx(without).epsilon(1e-12));
  }

  SUBCASE("missing snapshot with positive lambda is rejected") {
    CHECK_THROWS_AS(net.training_loss(batch, 1.0, 2.0), std::invalid_argument);
  }

  SUBCASE("bad temperature is rejected") {
    CHECK_THROWS_AS(net.training_loss(batch, 0.0, 0.0), std::invalid_argument);
  }
}

TEST_CASE("analytic gradient matches central finite differences") {
  ModelConfig cfg = tiny_config();
  VideoNet net(cfg, 8);
  net.expand_head(3);
  // make the snapshot differ from the current weights so the
  // distillation term is active
  net.set_snapshot();
  DetRng prng(77);
  for (double& v : net.mutable_parameters()) v += 0.02 * prng.normal();
  net.expand_head(2);

  DetRng rng(7);
  const Batch batch = random_batch(rng, 2, 2, 2, 8, 8, 5);
  const double lambda = 0.7, temp = 2.0;
  const auto lg = net.training_loss_and_grad(batch, lambda, temp);

  DetRng pick(1234);
  const double h = 1e-5;
  int checked = 0;
  double max_rel = 0.0;
  while (checked < 12) {
    const std::size_t i = pick.below(net.param_count());
    auto& params = net.mutable_parameters();
    const double orig = params[i];
    params[i] = orig + h;
    const double up = net.training_loss(batch, lambda, temp);
    params[i] = orig - h;
    const double down = net.training_loss(batch, lambda, temp);
    params[i] = orig;
    const double fd = (up - down) / (2 * h);
    const double denom = std::max({std::abs(fd), std::abs(lg.grad[i]), 1e-8});
    const double rel = std::abs(fd - lg.grad[i]) / denom;
    max_rel = std::max(max_rel, rel);
    CHECK(rel <= 1e-4);
    ++checked;
  }
  MESSAGE("max relative gradient error: ", max_rel);
}

TEST_CASE("one small SGD step decreases the loss") {
  VideoNet net(tiny_config(), 9);
  net.expand_head(4);
  DetRng rng(8);
  const Batch batch = random_batch(rng, 1, 2, 2, 8, 8, 4);
  const auto lg = net.training_loss_and_grad(batch, 0.0, 2.0);
  net.apply_gradient(lg.grad, 1e-3);
  const double after = net.training_loss(batch, 0.0, 2.0);
  CHECK(after < lg.loss);
}

TEST_CASE("checkpoint round-trip preserves parameters exactly") {
  VideoNet net(tiny_config(), 10);
  net.expand_head(6);
  const auto stem =
      std::filesystem::temp_directory_path() / "snro_ckpt" / "model";
  std::filesystem::remove_all(stem.parent_path());
  net.save(stem);
  const VideoNet loaded = VideoNet::load(stem);
  CHECK(loaded.num_classes() == net.num_classes());
  CHECK(loaded.parameters() == net.parameters());
  CHECK(loaded.param_hash() == net.param_hash());

  DetRng rng(9);
  const Batch batch = random_batch(rng, 1, 2, 2, 8, 8, 6);
  CHECK(loaded.forward(batch).logits == net.forward(batch).logits);
  std::filesystem::remove_all(stem.parent_path());
}

TEST_CASE("model config validation") {
  ModelConfig cfg = tiny_config();
  cfg.shift_fraction = 0.7;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.shift_block = 5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.conv_channels.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config(1);
  cfg.shift_block = 0;  // floor(1 * 0.25) = 0 shifted channels
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

}  // TEST_SUITE
