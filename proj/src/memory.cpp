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

#include "snro/memory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <stdexcept>

#include "snro/rng.hpp"

namespace snro {

namespace fs = std::filesystem;
using nlohmann::json;

const char* align_mode_name(AlignMode m) {
  switch (m) {
    case AlignMode::kUniform:
      return "uniform";
    case AlignMode::kRepeated:
      return "repeated";
    case AlignMode::kNone:
      return "none";
  }
  return "?";
}

std::optional<AlignMode> parse_align_mode(const std::string& name) {
  if (name == "uniform") return AlignMode::kUniform;
  if (name == "repeated") return AlignMode::kRepeated;
  if (name == "none") return AlignMode::kNone;
  return std::nullopt;
}

std::vector<int> herding_select(const Eigen::MatrixXd& features,
                                const Eigen::VectorXd& class_mean, int m) {
  const int n = static_cast<int>(features.rows());
  const int d = static_cast<int>(features.cols());
  if (n < 1) throw std::invalid_argument("herding_select: no candidates");
  if (d < 1) {
    throw std::invalid_argument("herding_select: zero-dimensional features");
  }
  if (m < 1) throw std::invalid_argument("herding_select: m must be >= 1");
  if (class_mean.size() != d) {
    throw std::invalid_argument("herding_select: mean/feature dim mismatch");
  }

  const int count = std::min(m, n);
  std::vector<int> selected;
  selected.reserve(count);
  std::vector<char> taken(n, 0);
  Eigen::VectorXd running_sum = Eigen::VectorXd::Zero(d);

  for (int step = 1; step <= count; ++step) {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double dist =
          (class_mean - (running_sum + features.row(i).transpose()) / step)
              .squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    taken[best] = 1;
    running_sum += features.row(best).transpose();
    selected.push_back(best);
  }
  return selected;
}

FrameSequence sparse_extract(const FrameSequence& video, int f_bar) {
  if (f_bar < 1) throw std::invalid_argument("sparse_extract: f_bar must be >= 1");
  if (f_bar > video.t) {
    throw std::invalid_argument("sparse_extract: f_bar=" + std::to_string(f_bar) +
                                " exceeds video length " + std::to_string(video.t));
  }
  const std::vector<int> idx = uniform_indices(video.t, f_bar);
  FrameSequence out;
  out.t = f_bar;
  out.c = video.c;
  out.h = video.h;
  out.w = video.w;
  out.label = video.label;
  out.source_id = video.source_id;
  out.frames.resize(out.total_elems());
  const std::size_t fe = video.frame_elems();
  for (int i = 0; i < f_bar; ++i) {
    std::copy_n(video.frame_data(idx[i]), fe, out.frame_data(i));
  }
  return out;
}

namespace {

FrameSequence make_aligned_shell(const FrameSequence& sparse, int f) {
  if (sparse.t < 1) throw std::invalid_argument("align: empty sequence");
  if (f % sparse.t != 0) {
    throw std::invalid_argument("align: target frame count " + std::to_string(f) +
                                " not divisible by stored count " +
                                std::to_string(sparse.t));
  }
  FrameSequence out;
  out.t = f;
  out.c = sparse.c;
  out.h = sparse.h;
  out.w = sparse.w;
  out.label = sparse.label;
  out.source_id = sparse.source_id;
  out.frames.resize(out.total_elems());
  return out;
}

}  // namespace

FrameSequence align_uniform(const FrameSequence& sparse, int f) {
  FrameSequence out = make_aligned_shell(sparse, f);
  const int r = f / sparse.t;
  const std::size_t fe = sparse.frame_elems();
  for (int i = 0; i < sparse.t; ++i) {
    const float* cur = sparse.frame_data(i);
    const bool last = (i == sparse.t - 1);
    const float* next = last ? cur : sparse.frame_data(i + 1);
    for (int o = 0; o < r; ++o) {
      float* dst = out.frame_data(i * r + o);
      if (o == 0 || last) {
        std::copy_n(cur, fe, dst);
      } else {
        const double wa = static_cast<double>(r - o) / r;
        const double wb = static_cast<double>(o) / r;
        for (std::size_t p = 0; p < fe; ++p) {
          dst[p] = static_cast<float>(wa * cur[p] + wb * next[p]);
        }
      }
    }
  }
  return out;
}

FrameSequence align_repeated(const FrameSequence& sparse, int f) {
  FrameSequence out = make_aligned_shell(sparse, f);
  const int r = f / sparse.t;
  const std::size_t fe = sparse.frame_elems();
  for (int i = 0; i < sparse.t; ++i) {
    for (int o = 0; o < r; ++o) {
      std::copy_n(sparse.frame_data(i), fe, out.frame_data(i * r + o));
    }
  }
  return out;
}

FrameSequence align_frames(const FrameSequence& sparse, int f, AlignMode mode) {
  switch (mode) {
    case AlignMode::kUniform:
      return align_uniform(sparse, f);
    case AlignMode::kRepeated:
      return align_repeated(sparse, f);
    case AlignMode::kNone:
      if (sparse.t != f) {
        throw std::invalid_argument(
            "align: mode 'none' requires sequences already at " +
            std::to_string(f) + " frames");
      }
      return sparse;
  }
  throw std::logic_error("align: bad mode");
}

FrameSequence StoredExemplar::to_sequence(int f_bar) const {
  FrameSequence seq;
  seq.t = f_bar;
  seq.c = c;
  seq.h = h;
  seq.w = w;
  seq.label = label;
  seq.source_id = source_id;
  seq.frames.resize(seq.total_elems());
  if (!data.empty()) {
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      seq.frames[i] = static_cast<float>(data[i]) / 255.0f;
    }
  } else {
    seq.frames = data_f32;
  }
  return seq;
}

ExemplarStore::ExemplarStore(int f, int f_bar, std::int64_t frame_bytes,
                             std::int64_t budget_per_class, bool quantize)
    : f_(f),
      f_bar_(f_bar),
      frame_bytes_(frame_bytes),
      budget_per_class_(budget_per_class),
      quantize_(quantize) {
  if (f < 1 || f_bar < 1) {
    throw std::invalid_argument("ExemplarStore: frame counts must be >= 1");
  }
  if (f % f_bar != 0) {
    throw std::invalid_argument("ExemplarStore: F=" + std::to_string(f) +
                                " not divisible by F_bar=" + std::to_string(f_bar));
  }
  if (frame_bytes < 1) {
    throw std::invalid_argument("ExemplarStore: frame_bytes must be >= 1");
  }
  if (budget_per_class < 0) {
    throw std::invalid_argument("ExemplarStore: negative budget");
  }
}

std::int64_t ExemplarStore::capacity_per_class() const {
  return budget_per_class_ / (static_cast<std::int64_t>(f_bar_) * frame_bytes_);
}

bool ExemplarStore::has_class(int class_id) const {
  return per_class_.count(class_id) > 0;
}

std::vector<int> ExemplarStore::class_ids() const {
  std::vector<int> ids;
  ids.reserve(per_class_.size());
  for (const auto& [id, _] : per_class_) ids.push_back(id);
  return ids;
}

const std::vector<StoredExemplar>& ExemplarStore::exemplars(int class_id) const {
  auto it = per_class_.find(class_id);
  if (it == per_class_.end()) {
    throw std::out_of_range("ExemplarStore: no exemplars for class " +
                            std::to_string(class_id));
  }
  return it->second;
}

std::int64_t ExemplarStore::class_bytes(int class_id) const {
  return static_cast<std::int64_t>(exemplars(class_id).size()) * f_bar_ *
         frame_bytes_;
}

std::size_t ExemplarStore::total_exemplars() const {
  std::size_t n = 0;
  for (const auto& [_, v] : per_class_) n += v.size();
  return n;
}

void ExemplarStore::check_budget_invariant(int class_id) const {
  if (class_bytes(class_id) > budget_per_class_) {
    throw std::logic_error("ExemplarStore: budget invariant violated for class " +
                           std::to_string(class_id));
  }
}

MemoryBuildReport ExemplarStore::build_memory_set(
    const std::vector<FrameSequence>& task_data,
    const std::function<Eigen::VectorXd(const FrameSequence&)>& features_fn,
    const std::vector<int>& class_ids) {
  MemoryBuildReport report;
  for (int cid : class_ids) {
    if (has_class(cid)) {
      throw std::invalid_argument("build_memory_set: class " +
                                  std::to_string(cid) + " already present");
    }
  }

  const std::int64_t capacity = capacity_per_class();
  for (int cid : class_ids) {
    std::vector<const FrameSequence*> candidates;
    for (const auto& seq : task_data) {
      if (seq.label == cid) candidates.push_back(&seq);
    }
    if (candidates.empty()) {
      throw std::invalid_argument("build_memory_set: no candidates for class " +
                                  std::to_string(cid));
    }

    per_class_[cid] = {};
    if (capacity == 0) {
      report.warnings.push_back(
          "class " + std::to_string(cid) + ": budget of " +
          std::to_string(budget_per_class_) + " bytes stores 0 videos (" +
          std::to_string(f_bar_) + " frames x " + std::to_string(frame_bytes_) +
          " bytes each)");
      report.stored_per_class[cid] = 0;
      continue;
    }

    Eigen::MatrixXd feats;
    Eigen::VectorXd mean;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const Eigen::VectorXd fi = features_fn(*candidates[i]);
      if (i == 0) {
        feats.resize(static_cast<Eigen::Index>(candidates.size()), fi.size());
        mean = Eigen::VectorXd::Zero(fi.size());
      }
      feats.row(static_cast<Eigen::Index>(i)) = fi.transpose();
      mean += fi;
    }
    mean /= static_cast<double>(candidates.size());

    const int want = static_cast<int>(
        std::min<std::int64_t>(capacity, static_cast<std::int64_t>(candidates.size())));
    const std::vector<int> order = herding_select(feats, mean, want);

    auto& bucket = per_class_[cid];
    bucket.reserve(order.size());
    for (int idx : order) {
      const FrameSequence& video = *candidates[idx];
      FrameSequence sparse = sparse_extract(video, f_bar_);
      StoredExemplar ex;
      ex.source_id = sparse.source_id;
      ex.label = sparse.label;
      ex.c = sparse.c;
      ex.h = sparse.h;
      ex.w = sparse.w;
      ex.frame_indices = uniform_indices(video.t, f_bar_);
      if (quantize_) {
        ex.data.resize(sparse.frames.size());
        for (std::size_t p = 0; p < sparse.frames.size(); ++p) {
          const float v = std::clamp(sparse.frames[p], 0.0f, 1.0f);
          ex.data[p] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
        }
      } else {
        ex.data_f32 = sparse.frames;
      }
      bucket.push_back(std::move(ex));
    }
    report.stored_per_class[cid] = static_cast<int>(bucket.size());
    check_budget_invariant(cid);
  }
  return report;
}

namespace {
constexpr int kStoreFormatVersion = 1;
}

void ExemplarStore::save(const fs::path& dir) const {
  fs::create_directories(dir);
  json root;
  root["format_version"] = kStoreFormatVersion;
  root["f"] = f_;
  root["f_bar"] = f_bar_;
  root["frame_bytes"] = frame_bytes_;
  root["budget_per_class"] = budget_per_class_;
  root["quantized"] = quantize_;
  root["classes"] = class_ids();
  std::ofstream(dir / "store.json") << root.dump(2) << "\n";

  for (const auto& [cid, bucket] : per_class_) {
    const fs::path cdir = dir / ("class_" + std::to_string(cid));
    fs::create_directories(cdir);
    json manifest;
    manifest["class_id"] = cid;
    json entries = json::array();
    std::ofstream blob(cdir / "frames.bin", std::ios::binary);
    for (const auto& ex : bucket) {
      json e;
      e["source_id"] = ex.source_id;
      e["label"] = ex.label;
      e["c"] = ex.c;
      e["h"] = ex.h;
      e["w"] = ex.w;
      e["frame_indices"] = ex.frame_indices;
      entries.push_back(std::move(e));
      if (quantize_) {
        blob.write(reinterpret_cast<const char*>(ex.data.data()),
                   static_cast<std::streamsize>(ex.data.size()));
      } else {
        blob.write(reinterpret_cast<const char*>(ex.data_f32.data()),
                   static_cast<std::streamsize>(ex.data_f32.size() * sizeof(float)));
      }
    }
    manifest["exemplars"] = std::move(entries);
    std::ofstream(cdir / "manifest.json") << manifest.dump(2) << "\n";
  }
}

ExemplarStore ExemplarStore::load(const fs::path& dir) {
  std::ifstream in(dir / "store.json");
  if (!in) {
    throw std::runtime_error("ExemplarStore: cannot open " +
                             (dir / "store.json").string());
  }
  json root = json::parse(in);
  if (root.at("format_version").get<int>() != kStoreFormatVersion) {
    throw std::runtime_error("ExemplarStore: unsupported format version");
  }
  ExemplarStore store(root.at("f").get<int>(), root.at("f_bar").get<int>(),
                      root.at("frame_bytes").get<std::int64_t>(),
                      root.at("budget_per_class").get<std::int64_t>(),
                      root.at("quantized").get<bool>());

  for (int cid : root.at("classes").get<std::vector<int>>()) {
    const fs::path cdir = dir / ("class_" + std::to_string(cid));
    std::ifstream min(cdir / "manifest.json");
    if (!min) {
      throw std::runtime_error("ExemplarStore: missing manifest for class " +
                               std::to_string(cid));
    }
    json manifest = json::parse(min);
    std::ifstream blob(cdir / "frames.bin", std::ios::binary);
    auto& bucket = store.per_class_[cid];
    for (const auto& e : manifest.at("exemplars")) {
      StoredExemplar ex;
      ex.source_id = e.at("source_id").get<std::string>();
      ex.label = e.at("label").get<int>();
      ex.c = e.at("c").get<int>();
      ex.h = e.at("h").get<int>();
      ex.w = e.at("w").get<int>();
      ex.frame_indices = e.at("frame_indices").get<std::vector<int>>();
      const std::size_t elems = static_cast<std::size_t>(store.f_bar_) * ex.c *
                                ex.h * ex.w;
      if (store.quantize_) {
        ex.data.resize(elems);
        blob.read(reinterpret_cast<char*>(ex.data.data()),
                  static_cast<std::streamsize>(elems));
      } else {
        ex.data_f32.resize(elems);
        blob.read(reinterpret_cast<char*>(ex.data_f32.data()),
                  static_cast<std::streamsize>(elems * sizeof(float)));
      }
      if (!blob) {
        throw std::runtime_error("ExemplarStore: truncated frames.bin for class " +
                                 std::to_string(cid));
      }
      bucket.push_back(std::move(ex));
    }
    store.check_budget_invariant(cid);
  }
  return store;
}

ReplayBuffer::ReplayBuffer(const ExemplarStore& store, AlignMode mode) {
  for (int cid : store.class_ids()) {
    for (const auto& ex : store.exemplars(cid)) {
      FrameSequence sparse = ex.to_sequence(store.f_bar());
      sequences_.push_back(align_frames(sparse, store.f(), mode));
      by_class_[cid].push_back(sequences_.size() - 1);
    }
  }
}

std::vector<std::size_t> ReplayBuffer::epoch_order(std::uint64_t rng_key,
                                                   bool balanced) const {
  DetRng rng(rng_key);
  std::vector<std::size_t> order;
  if (!balanced) {
    order.resize(sequences_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    return order;
  }

  std::size_t max_count = 0;
  for (const auto& [_, idxs] : by_class_) {
    max_count = std::max(max_count, idxs.size());
  }
  for (const auto& [_, idxs] : by_class_) {
    std::vector<std::size_t> perm = idxs;
    rng.shuffle(perm);
    for (std::size_t i = 0; i < max_count; ++i) {
      if (i < perm.size()) {
        order.push_back(perm[i]);
      } else {
        order.push_back(idxs[rng.below(idxs.size())]);
      }
    }
  }
  rng.shuffle(order);
  return order;
}

}  // namespace snro
