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

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "snro/dataset.hpp"

namespace snro {

namespace fs = std::filesystem;

namespace {

bool has_frame_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<fs::path> sorted_subdirs(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });
  return out;
}

std::vector<fs::path> sorted_frames(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && has_frame_extension(e.path())) {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });
  return out;
}

std::string sanitize_name(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    out.push_back(std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_');
  }
  return out.empty() ? std::string("video") : out;
}

}  // namespace

std::vector<std::string> list_class_names(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw std::runtime_error("frame directory not found: " + root.string());
  }
  std::vector<std::string> names;
  for (const auto& d : sorted_subdirs(root)) names.push_back(d.filename().string());
  return names;
}

std::vector<FrameSequence> load_frame_directory(const fs::path& root, int f) {
  if (f < 1) throw std::invalid_argument("load_frame_directory: f must be >= 1");
  if (!fs::is_directory(root)) {
    throw std::runtime_error("frame directory not found: " + root.string());
  }
  const std::vector<fs::path> class_dirs = sorted_subdirs(root);
  if (class_dirs.empty()) {
    throw std::runtime_error("frame directory has no class subdirectories: " +
                             root.string());
  }

  std::vector<FrameSequence> out;
  int label = 0;
  for (const auto& cdir : class_dirs) {
    const std::vector<fs::path> videos = sorted_subdirs(cdir);
    if (videos.empty()) {
      throw std::runtime_error("class directory is empty: " +
                               cdir.filename().string());
    }
    for (const auto& vdir : videos) {
      const std::vector<fs::path> frames = sorted_frames(vdir);
      if (frames.empty()) {
        throw std::runtime_error("video directory has no frames: " +
                                 vdir.string());
      }
      if (static_cast<int>(frames.size()) < f) {
        throw std::runtime_error("video " + vdir.string() + " has " +
                                 std::to_string(frames.size()) +
                                 " frames, need at least " + std::to_string(f));
      }
      const std::vector<int> pick =
          uniform_indices(static_cast<int>(frames.size()), f);

      FrameSequence seq;
      seq.label = label;
      seq.source_id =
          cdir.filename().string() + "/" + vdir.filename().string();
      for (int i = 0; i < f; ++i) {
        const fs::path& fp = frames[pick[i]];
        cv::Mat img = cv::imread(fp.string(), cv::IMREAD_UNCHANGED);
        if (img.empty()) {
          throw std::runtime_error("cannot decode frame: " + fp.string());
        }
        if (img.depth() != CV_8U) {
          throw std::runtime_error("unsupported bit depth (need 8-bit): " +
                                   fp.string());
        }
        if (img.channels() == 4) {  // drop alpha
          cv::Mat tmp(img.size(), CV_8UC3);
          for (int y = 0; y < img.rows; ++y) {
            const std::uint8_t* s = img.ptr<std::uint8_t>(y);
            std::uint8_t* d = tmp.ptr<std::uint8_t>(y);
            for (int x = 0; x < img.cols; ++x) {
              d[x * 3 + 0] = s[x * 4 + 0];
              d[x * 3 + 1] = s[x * 4 + 1];
              d[x * 3 + 2] = s[x * 4 + 2];
            }
          }
          img = tmp;
        }
        if (img.channels() != 1 && img.channels() != 3) {
          throw std::runtime_error("unsupported channel count: " + fp.string());
        }
        if (i == 0) {
          seq.t = f;
          seq.c = img.channels();
          seq.h = img.rows;
          seq.w = img.cols;
          seq.frames.resize(seq.total_elems());
        } else if (img.channels() != seq.c || img.rows != seq.h ||
                   img.cols != seq.w) {
          throw std::runtime_error("frame shape mismatch: " + fp.string());
        }
        float* dst = seq.frame_data(i);
        const std::size_t plane = static_cast<std::size_t>(seq.h) * seq.w;
        for (int y = 0; y < seq.h; ++y) {
          const std::uint8_t* row = img.ptr<std::uint8_t>(y);
          for (int x = 0; x < seq.w; ++x) {
            if (seq.c == 1) {
              dst[y * seq.w + x] = row[x] / 255.0f;
            } else {
              // OpenCV stores BGR; in-memory order is RGB planes.
              dst[0 * plane + y * seq.w + x] = row[x * 3 + 2] / 255.0f;
              dst[1 * plane + y * seq.w + x] = row[x * 3 + 1] / 255.0f;
              dst[2 * plane + y * seq.w + x] = row[x * 3 + 0] / 255.0f;
            }
          }
        }
      }
      out.push_back(std::move(seq));
    }
    ++label;
  }
  return out;
}

void export_frame_directory(const std::vector<FrameSequence>& data,
                            const fs::path& root) {
  fs::create_directories(root);
  for (const auto& seq : data) {
    if (seq.c != 1 && seq.c != 3) {
      throw std::invalid_argument("export_frame_directory: only C=1 or C=3 (got " +
                                  std::to_string(seq.c) + ")");
    }
    char cls[32];
    std::snprintf(cls, sizeof(cls), "class_%04d", seq.label);
    const fs::path vdir = root / cls / sanitize_name(seq.source_id);
    fs::create_directories(vdir);
    const std::size_t plane = static_cast<std::size_t>(seq.h) * seq.w;
    for (int t = 0; t < seq.t; ++t) {
      cv::Mat img(seq.h, seq.w, seq.c == 1 ? CV_8UC1 : CV_8UC3);
      const float* src = seq.frame_data(t);
      for (int y = 0; y < seq.h; ++y) {
        std::uint8_t* row = img.ptr<std::uint8_t>(y);
        for (int x = 0; x < seq.w; ++x) {
          auto q = [&](float v) {
            return static_cast<std::uint8_t>(
                std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
          };
          if (seq.c == 1) {
            row[x] = q(src[y * seq.w + x]);
          } else {
            row[x * 3 + 0] = q(src[2 * plane + y * seq.w + x]);
            row[x * 3 + 1] = q(src[1 * plane + y * seq.w + x]);
            row[x * 3 + 2] = q(src[0 * plane + y * seq.w + x]);
          }
        }
      }
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%04d.png", t);
      if (!cv::imwrite((vdir / name).string(), img)) {
        throw std::runtime_error("failed to write frame: " +
                                 (vdir / name).string());
      }
    }
  }
}

}  // namespace snro
