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

#include "snro/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "snro/rng.hpp"

namespace snro {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_delta(double a, double b, double period) {
  double d = std::fmod(a - b, period);
  if (d < -period / 2) d += period;
  if (d > period / 2) d -= period;
  return d;
}

// Signed distance (pixels) to the boundary of the class shape; negative
// inside. Four shape families cycled over class ids.
double shape_distance(int shape, double dx, double dy, double radius) {
  const double ax = std::abs(dx);
  const double ay = std::abs(dy);
  switch (shape) {
    case 0:  // square
      return std::max(ax, ay) - radius;
    case 1:  // disc
      return std::sqrt(dx * dx + dy * dy) - radius;
    case 2: {  // plus
      const double bar = 0.4 * radius;
      const double d1 = std::max(ax - radius, ay - bar);
      const double d2 = std::max(ax - bar, ay - radius);
      return std::min(d1, d2);
    }
    default: {  // ring
      const double r = std::sqrt(dx * dx + dy * dy);
      return std::abs(r - 0.75 * radius) - 0.35 * radius;
    }
  }
}

}  // namespace

int TaskSchedule::classes_seen(int task) const {
  if (task < 0 || task >= num_tasks()) {
    throw std::out_of_range("TaskSchedule: task index " + std::to_string(task));
  }
  int n = 0;
  for (int k = 0; k <= task; ++k) n += static_cast<int>(groups[k].size());
  return n;
}

int TaskSchedule::task_of_class(int class_id) const {
  for (int k = 0; k < num_tasks(); ++k) {
    for (int c : groups[k]) {
      if (c == class_id) return k;
    }
  }
  return -1;
}

TaskSchedule make_schedule(int num_classes, int initial, int per_stage,
                           std::uint64_t seed) {
  if (num_classes < 2) {
    throw std::invalid_argument("make_schedule: need at least 2 classes");
  }
  if (initial < 1 || initial > num_classes) {
    throw std::invalid_argument("make_schedule: initial group size " +
                                std::to_string(initial) + " out of range");
  }
  const int rest = num_classes - initial;
  if (rest > 0 && per_stage < 1) {
    throw std::invalid_argument("make_schedule: per_stage must be >= 1");
  }
  if (rest > 0 && rest % per_stage != 0) {
    throw std::invalid_argument(
        "make_schedule: remaining " + std::to_string(rest) +
        " classes not divisible by per-stage size " + std::to_string(per_stage));
  }

  TaskSchedule sched;
  sched.seed = seed;
  sched.class_order.resize(num_classes);
  for (int i = 0; i < num_classes; ++i) sched.class_order[i] = i;
  DetRng rng(seed_mix({seed, fnv1a64("class_order")}));
  rng.shuffle(sched.class_order);

  auto it = sched.class_order.begin();
  sched.groups.emplace_back(it, it + initial);
  it += initial;
  while (it != sched.class_order.end()) {
    sched.groups.emplace_back(it, it + per_stage);
    it += per_stage;
  }
  return sched;
}

std::vector<FrameSequence> generate_synthetic_dataset(int num_classes,
                                                      int samples_per_class,
                                                      int t, int c, int h, int w,
                                                      std::uint64_t seed) {
  if (num_classes < 2) {
    throw std::invalid_argument("synthetic dataset: need at least 2 classes");
  }
  if (samples_per_class < 1 || t < 1 || c < 1 || h < 1 || w < 1) {
    throw std::invalid_argument("synthetic dataset: all dimensions must be >= 1");
  }

  std::vector<FrameSequence> out;
  out.reserve(static_cast<std::size_t>(num_classes) * samples_per_class);

  for (int cls = 0; cls < num_classes; ++cls) {
    // Class identity: velocity (angle + speed), shape family, stripe
    // frequency/orientation and a colour from a hue wheel.
    const double angle = 2.0 * kPi * cls / num_classes;
    const double speed =
        (0.06 + 0.05 * (cls % 3)) * std::min(h, w);  // px per frame
    const double vx = speed * std::cos(angle);
    const double vy = speed * std::sin(angle);
    const int shape = cls % 4;
    const double stripe_freq = 0.25 + 0.12 * (cls % 5);
    const double stripe_angle = kPi * ((cls / 4) % 4) / 4.0;
    const double hue = std::fmod(cls * 0.61803398875, 1.0);

    std::vector<double> channel_gain(c);
    for (int ch = 0; ch < c; ++ch) {
      channel_gain[ch] =
          0.35 + 0.62 * (0.5 + 0.5 * std::cos(2.0 * kPi * (hue + static_cast<double>(ch) / std::max(c, 3))));
    }

    const double radius = 0.22 * std::min(h, w);

    for (int s = 0; s < samples_per_class; ++s) {
      DetRng rng(seed_mix({seed, fnv1a64("synthetic"),
                           static_cast<std::uint64_t>(cls),
                           static_cast<std::uint64_t>(s)}));
      const double x0 = rng.uniform(0.0, w);
      const double y0 = rng.uniform(0.0, h);
      const double phase = rng.uniform(0.0, 2.0 * kPi);
      const double brightness = rng.uniform(0.78, 1.0);

      FrameSequence seq;
      seq.t = t;
      seq.c = c;
      seq.h = h;
      seq.w = w;
      seq.label = cls;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "class%03d_sample%04d", cls, s);
      seq.source_id = buf;
      seq.frames.resize(seq.total_elems());

      for (int ti = 0; ti < t; ++ti) {
        const double cx = x0 + vx * ti;
        const double cy = y0 + vy * ti;
        for (int yi = 0; yi < h; ++yi) {
          for (int xi = 0; xi < w; ++xi) {
            const double dx = wrap_delta(xi + 0.5, cx, w);
            const double dy = wrap_delta(yi + 0.5, cy, h);
            const double dist = shape_distance(shape, dx, dy, radius);
            const double mask = std::clamp(0.5 - dist, 0.0, 1.0);
            const double stripe =
                0.5 + 0.5 * std::sin(phase +
                                     2.0 * kPi * stripe_freq *
                                         (dx * std::cos(stripe_angle) +
                                          dy * std::sin(stripe_angle)));
            const double fg = brightness * (0.45 + 0.55 * stripe);
            const double noise = rng.uniform(-0.02, 0.02);
            for (int ch = 0; ch < c; ++ch) {
              const double v = 0.08 + mask * fg * channel_gain[ch] + noise;
              seq.at(ti, ch, yi, xi) = static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
          }
        }
      }
      out.push_back(std::move(seq));
    }
  }
  return out;
}

}  // namespace snro
