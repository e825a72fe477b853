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

#include "snro/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "snro/rng.hpp"

namespace snro {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRowMat = Eigen::Map<RowMat>;
using MapConstRowMat = Eigen::Map<const RowMat>;

int shift_channels(int c, double fraction) {
  return static_cast<int>(std::floor(c * fraction));
}

// 3x3 kernel, pad 1. col is (C*9) x (H*W); k index = (cin*3 + ky)*3 + kx.
void im2col3x3(const double* x, int c, int h, int w, Eigen::MatrixXd& col) {
  col.resize(static_cast<Eigen::Index>(c) * 9, static_cast<Eigen::Index>(h) * w);
  for (int cin = 0; cin < c; ++cin) {
    const double* plane = x + static_cast<std::size_t>(cin) * h * w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const int k = (cin * 3 + ky) * 3 + kx;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) {
            for (int xq = 0; xq < w; ++xq) {
              col(k, static_cast<Eigen::Index>(y) * w + xq) = 0.0;
            }
            continue;
          }
          const double* srow = plane + static_cast<std::size_t>(sy) * w;
          for (int xq = 0; xq < w; ++xq) {
            const int sx = xq + kx - 1;
            col(k, static_cast<Eigen::Index>(y) * w + xq) =
                (sx < 0 || sx >= w) ? 0.0 : srow[sx];
          }
        }
      }
    }
  }
}

void col2im3x3(const Eigen::MatrixXd& col, int c, int h, int w, double* dx) {
  std::fill(dx, dx + static_cast<std::size_t>(c) * h * w, 0.0);
  for (int cin = 0; cin < c; ++cin) {
    double* plane = dx + static_cast<std::size_t>(cin) * h * w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const int k = (cin * 3 + ky) * 3 + kx;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          double* drow = plane + static_cast<std::size_t>(sy) * w;
          for (int xq = 0; xq < w; ++xq) {
            const int sx = xq + kx - 1;
            if (sx < 0 || sx >= w) continue;
            drow[sx] += col(k, static_cast<Eigen::Index>(y) * w + xq);
          }
        }
      }
    }
  }
}

// 2x2 average pool, stride 2; odd trailing rows/columns are dropped.
void avgpool2(const std::vector<double>& in, int n, int c, int h, int w,
              std::vector<double>& out, int& ho, int& wo) {
  ho = h / 2;
  wo = w / 2;
  out.assign(static_cast<std::size_t>(n) * c * ho * wo, 0.0);
  for (int i = 0; i < n * c; ++i) {
    const double* src = in.data() + static_cast<std::size_t>(i) * h * w;
    double* dst = out.data() + static_cast<std::size_t>(i) * ho * wo;
    for (int y = 0; y < ho; ++y) {
      for (int x = 0; x < wo; ++x) {
        dst[y * wo + x] = 0.25 * (src[(2 * y) * w + 2 * x] +
                                  src[(2 * y) * w + 2 * x + 1] +
                                  src[(2 * y + 1) * w + 2 * x] +
                                  src[(2 * y + 1) * w + 2 * x + 1]);
      }
    }
  }
}

void avgpool2_backward(const std::vector<double>& dout, int n, int c, int h,
                       int w, std::vector<double>& din) {
  const int ho = h / 2;
  const int wo = w / 2;
  din.assign(static_cast<std::size_t>(n) * c * h * w, 0.0);
  for (int i = 0; i < n * c; ++i) {
    const double* src = dout.data() + static_cast<std::size_t>(i) * ho * wo;
    double* dst = din.data() + static_cast<std::size_t>(i) * h * w;
    for (int y = 0; y < ho; ++y) {
      for (int x = 0; x < wo; ++x) {
        const double g = 0.25 * src[y * wo + x];
        dst[(2 * y) * w + 2 * x] += g;
        dst[(2 * y) * w + 2 * x + 1] += g;
        dst[(2 * y + 1) * w + 2 * x] += g;
        dst[(2 * y + 1) * w + 2 * x + 1] += g;
      }
    }
  }
}

// reverse=false: channels [0,k) get in[t-1], channels [k,2k) get in[t+1].
// reverse=true swaps the directions (the transpose of the forward map).
void shift_apply(const std::vector<double>& in, int b, int t, int c, int h,
                 int w, int k, bool reverse, std::vector<double>& out) {
  out.assign(in.size(), 0.0);
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const std::size_t frame = static_cast<std::size_t>(c) * plane;
  for (int bi = 0; bi < b; ++bi) {
    const std::size_t base = static_cast<std::size_t>(bi) * t * frame;
    for (int ti = 0; ti < t; ++ti) {
      for (int ci = 0; ci < c; ++ci) {
        int src_t = ti;
        if (ci < k) {
          src_t = reverse ? ti + 1 : ti - 1;
        } else if (ci < 2 * k) {
          src_t = reverse ? ti - 1 : ti + 1;
        }
        double* dst = out.data() + base + ti * frame + ci * plane;
        if (src_t < 0 || src_t >= t) continue;  // stays zero
        const double* src = in.data() + base + src_t * frame + ci * plane;
        std::copy(src, src + plane, dst);
      }
    }
  }
}

double logsumexp_row(const Eigen::RowVectorXd& z) {
  const double m = z.maxCoeff();
  return m + std::log((z.array() - m).exp().sum());
}

constexpr int kCheckpointVersion = 1;

}  // namespace

void ModelConfig::validate() const {
  if (in_channels < 1) {
    throw std::invalid_argument("model: in_channels must be >= 1");
  }
  if (conv_channels.empty()) {
    throw std::invalid_argument("model: conv_channels must be non-empty");
  }
  for (int c : conv_channels) {
    if (c < 1) throw std::invalid_argument("model: conv channel width must be >= 1");
  }
  if (shift_block < 0 || shift_block >= static_cast<int>(conv_channels.size())) {
    throw std::invalid_argument("model: shift_block out of range");
  }
  if (!(shift_fraction > 0.0 && shift_fraction <= 0.5)) {
    throw std::invalid_argument("model: shift_fraction must be in (0, 0.5]");
  }
  const int shift_in =
      shift_block == 0 ? in_channels : conv_channels[shift_block - 1];
  if (shift_channels(shift_in, shift_fraction) < 1) {
    throw std::invalid_argument(
        "model: shift_fraction yields an empty shifted channel block");
  }
}

void batch_append(Batch& batch, const FrameSequence& seq, int head_label) {
  if (batch.b == 0) {
    batch.t = seq.t;
    batch.c = seq.c;
    batch.h = seq.h;
    batch.w = seq.w;
  } else if (seq.t != batch.t || seq.c != batch.c || seq.h != batch.h ||
             seq.w != batch.w) {
    throw std::invalid_argument("batch_append: sequence shape mismatch");
  }
  batch.x.reserve(batch.x.size() + seq.frames.size());
  for (float v : seq.frames) batch.x.push_back(static_cast<double>(v));
  batch.labels.push_back(head_label);
  batch.b += 1;
}

std::vector<double> temporal_shift(const std::vector<double>& x, int b, int t,
                                   int c, int h, int w,
                                   double shift_fraction) {
  if (!(shift_fraction > 0.0 && shift_fraction <= 0.5)) {
    throw std::invalid_argument("temporal_shift: shift_fraction must be in (0, 0.5]");
  }
  if (x.size() != static_cast<std::size_t>(b) * t * c * h * w) {
    throw std::invalid_argument("temporal_shift: buffer size mismatch");
  }
  const int k = shift_channels(c, shift_fraction);
  if (k < 1) {
    throw std::invalid_argument(
        "temporal_shift: floor(C*shift_fraction) must be >= 1");
  }
  std::vector<double> out;
  shift_apply(x, b, t, c, h, w, k, false, out);
  return out;
}

// ---------------------------------------------------------------------------
// VideoNet

VideoNet::VideoNet(ModelConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), seed_(seed) {
  cfg_.validate();
  theta_.resize(backbone_params());
  int in_c = cfg_.in_channels;
  for (std::size_t i = 0; i < cfg_.conv_channels.size(); ++i) {
    const int out_c = cfg_.conv_channels[i];
    DetRng rng(seed_mix({seed_, fnv1a64("conv_init"), i}));
    const double stddev = std::sqrt(2.0 / (in_c * 9));
    double* w = theta_.data() + conv_w_off(static_cast<int>(i));
    for (int p = 0; p < out_c * in_c * 9; ++p) w[p] = rng.normal(0.0, stddev);
    // biases start at zero
    in_c = out_c;
  }
}

std::size_t VideoNet::conv_w_off(int block) const {
  std::size_t off = 0;
  int in_c = cfg_.in_channels;
  for (int i = 0; i < block; ++i) {
    off += static_cast<std::size_t>(cfg_.conv_channels[i]) * in_c * 9 +
           cfg_.conv_channels[i];
    in_c = cfg_.conv_channels[i];
  }
  return off;
}

std::size_t VideoNet::conv_b_off(int block) const {
  const int in_c = block == 0 ? cfg_.in_channels : cfg_.conv_channels[block - 1];
  return conv_w_off(block) +
         static_cast<std::size_t>(cfg_.conv_channels[block]) * in_c * 9;
}

std::size_t VideoNet::backbone_params() const {
  return conv_w_off(static_cast<int>(cfg_.conv_channels.size()));
}

std::size_t VideoNet::head_w_off() const { return backbone_params(); }

std::size_t VideoNet::head_b_off() const {
  return head_w_off() + static_cast<std::size_t>(num_classes_) * feature_dim();
}

void VideoNet::expand_head(int new_classes) {
  if (new_classes < 1) {
    throw std::invalid_argument("expand_head: new_classes must be >= 1");
  }
  const int old = num_classes_;
  const int feat = feature_dim();
  std::vector<double> next(backbone_params() +
                           static_cast<std::size_t>(old + new_classes) * (feat + 1));
  std::copy_n(theta_.data(), head_w_off(), next.data());
  std::copy_n(theta_.data() + head_w_off(), static_cast<std::size_t>(old) * feat,
              next.data() + head_w_off());
  DetRng rng(seed_mix({seed_, fnv1a64("head_init"),
                       static_cast<std::uint64_t>(old),
                       static_cast<std::uint64_t>(new_classes)}));
  double* fresh = next.data() + head_w_off() + static_cast<std::size_t>(old) * feat;
  for (int p = 0; p < new_classes * feat; ++p) {
    fresh[p] = rng.normal(0.0, cfg_.head_init_scale);
  }
  const std::size_t new_b_off =
      head_w_off() + static_cast<std::size_t>(old + new_classes) * feat;
  std::copy_n(theta_.data() + head_b_off(), old, next.data() + new_b_off);
  // new biases stay zero
  theta_ = std::move(next);
  num_classes_ += new_classes;
}

struct VideoNet::ForwardCache {
  std::vector<std::vector<double>> x_in;  // conv input per block (post shift)
  std::vector<std::vector<double>> y;     // post-relu, pre-pool per block
  std::vector<int> hh, ww;                // spatial dims at each block
  Eigen::MatrixXd features;
};

void VideoNet::forward_impl(const std::vector<double>& theta, int num_classes,
                            const Batch& batch, ForwardCache* cache,
                            Eigen::MatrixXd& logits,
                            Eigen::MatrixXd& features) const {
  if (batch.b < 1) throw std::invalid_argument("forward: empty batch");
  if (batch.c != cfg_.in_channels) {
    throw std::invalid_argument("forward: batch has " + std::to_string(batch.c) +
                                " channels, model expects " +
                                std::to_string(cfg_.in_channels));
  }
  if (batch.x.size() !=
      static_cast<std::size_t>(batch.b) * batch.sample_elems()) {
    throw std::invalid_argument("forward: batch buffer size mismatch");
  }

  const int nb = static_cast<int>(cfg_.conv_channels.size());
  const int n_img = batch.b * batch.t;
  const int feat = feature_dim();

  ForwardCache local;
  ForwardCache& cc = cache ? *cache : local;
  cc.x_in.resize(nb);
  cc.y.resize(nb);
  cc.hh.resize(nb);
  cc.ww.resize(nb);

  std::vector<double> cur = batch.x;
  int h = batch.h, w = batch.w;
  int in_c = cfg_.in_channels;
  Eigen::MatrixXd colbuf;

  for (int i = 0; i < nb; ++i) {
    if (h < 1 || w < 1) {
      throw std::invalid_argument("forward: spatial dims collapse to zero; "
                                  "input too small for the pooling chain");
    }
    if (i == cfg_.shift_block) {
      const int k = shift_channels(in_c, cfg_.shift_fraction);
      std::vector<double> shifted;
      shift_apply(cur, batch.b, batch.t, in_c, h, w, k, false, shifted);
      cur = std::move(shifted);
    }
    cc.x_in[i] = std::move(cur);
    cc.hh[i] = h;
    cc.ww[i] = w;

    const int out_c = cfg_.conv_channels[i];
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    cc.y[i].assign(static_cast<std::size_t>(n_img) * out_c * hw, 0.0);
    const MapConstRowMat wm(theta.data() + conv_w_off(i), out_c,
                            static_cast<Eigen::Index>(in_c) * 9);
    const Eigen::Map<const Eigen::VectorXd> bv(theta.data() + conv_b_off(i),
                                               out_c);
    for (int n = 0; n < n_img; ++n) {
      im2col3x3(cc.x_in[i].data() + static_cast<std::size_t>(n) * in_c * hw,
                in_c, h, w, colbuf);
      MapRowMat zm(cc.y[i].data() + static_cast<std::size_t>(n) * out_c * hw,
                   out_c, static_cast<Eigen::Index>(hw));
      zm.noalias() = wm * colbuf;
      zm.colwise() += bv;
    }
    for (double& v : cc.y[i]) v = v > 0.0 ? v : 0.0;  // ReLU

    if (i < nb - 1) {
      int ho = 0, wo = 0;
      std::vector<double> pooled;
      avgpool2(cc.y[i], n_img, out_c, h, w, pooled, ho, wo);
      cur = std::move(pooled);
      h = ho;
      w = wo;
    } else {
      cur = cc.y[i];
    }
    in_c = out_c;
  }

  // Global average pool over (T, H, W).
  features.resize(batch.b, feat);
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  const double inv = 1.0 / (static_cast<double>(batch.t) * hw);
  for (int bi = 0; bi < batch.b; ++bi) {
    for (int ch = 0; ch < feat; ++ch) {
      double sum = 0.0;
      for (int ti = 0; ti < batch.t; ++ti) {
        const double* plane = cur.data() +
                              ((static_cast<std::size_t>(bi) * batch.t + ti) * feat +
                               ch) * hw;
        for (std::size_t p = 0; p < hw; ++p) sum += plane[p];
      }
      features(bi, ch) = sum * inv;
    }
  }
  cc.features = features;

  const MapConstRowMat hw_map(theta.data() + head_w_off(), num_classes, feat);
  const Eigen::Map<const Eigen::VectorXd> hb(
      theta.data() + head_w_off() + static_cast<std::size_t>(num_classes) * feat,
      num_classes);
  logits.noalias() = features * hw_map.transpose();
  logits.rowwise() += hb.transpose();

  if (!logits.allFinite() || !features.allFinite()) {
    throw std::runtime_error("forward: non-finite activations");
  }
}

BatchLogits VideoNet::forward(const Batch& batch) const {
  BatchLogits out;
  forward_impl(theta_, num_classes_, batch, nullptr, out.logits, out.features);
  return out;
}

Eigen::VectorXd VideoNet::features_of(const FrameSequence& seq) const {
  Batch b;
  batch_append(b, seq, -1);
  Eigen::MatrixXd logits, features;
  forward_impl(theta_, num_classes_, b, nullptr, logits, features);
  return features.row(0).transpose();
}

double VideoNet::loss_terms(const Batch& batch, const Eigen::MatrixXd& logits,
                            double lambda_distill, double temperature,
                            Eigen::MatrixXd* dlogits) const {
  if (temperature <= 0.0) {
    throw std::invalid_argument("training_loss: temperature must be > 0");
  }
  if (lambda_distill < 0.0) {
    throw std::invalid_argument("training_loss: lambda_distill must be >= 0");
  }
  if (lambda_distill > 0.0 && !snapshot_.has_value()) {
    throw std::invalid_argument(
        "training_loss: lambda_distill > 0 requires a model snapshot");
  }
  const int b = batch.b;
  if (static_cast<int>(batch.labels.size()) != b) {
    throw std::invalid_argument("training_loss: label count mismatch");
  }
  for (int l : batch.labels) {
    if (l < 0 || l >= num_classes_) {
      throw std::invalid_argument("training_loss: label " + std::to_string(l) +
                                  " outside head width " +
                                  std::to_string(num_classes_));
    }
  }

  if (dlogits) dlogits->setZero(b, num_classes_);

  double ce = 0.0;
  for (int i = 0; i < b; ++i) {
    const Eigen::RowVectorXd z = logits.row(i);
    const double lse = logsumexp_row(z);
    ce += lse - z(batch.labels[i]);
    if (dlogits) {
      Eigen::RowVectorXd soft = (z.array() - lse).exp();
      soft(batch.labels[i]) -= 1.0;
      dlogits->row(i) += soft / b;
    }
  }
  double loss = ce / b;

  if (lambda_distill > 0.0 && snapshot_->num_classes > 0) {
    const int k_old = snapshot_->num_classes;
    Eigen::MatrixXd snap_logits, snap_features;
    forward_impl(snapshot_->theta, k_old, batch, nullptr, snap_logits,
                 snap_features);
    double kl_sum = 0.0;
    for (int i = 0; i < b; ++i) {
      const Eigen::RowVectorXd zs = snap_logits.row(i) / temperature;
      const Eigen::RowVectorXd zc =
          logits.row(i).head(k_old) / temperature;
      const double lse_s = logsumexp_row(zs);
      const double lse_c = logsumexp_row(zc);
      const Eigen::RowVectorXd logp = zs.array() - lse_s;
      const Eigen::RowVectorXd logq = zc.array() - lse_c;
      const Eigen::RowVectorXd p = logp.array().exp();
      kl_sum += (p.array() * (logp - logq).array()).sum();
      if (dlogits) {
        const Eigen::RowVectorXd q = logq.array().exp();
        dlogits->row(i).head(k_old) +=
            lambda_distill * temperature / b * (q - p);
      }
    }
    loss += lambda_distill * temperature * temperature * kl_sum / b;
  }

  if (!std::isfinite(loss)) {
    throw std::runtime_error("training_loss: non-finite loss");
  }
  return loss;
}

double VideoNet::training_loss(const Batch& batch, double lambda_distill,
                               double temperature) const {
  Eigen::MatrixXd logits, features;
  forward_impl(theta_, num_classes_, batch, nullptr, logits, features);
  return loss_terms(batch, logits, lambda_distill, temperature, nullptr);
}

void VideoNet::backward_impl(const Batch& batch, const ForwardCache& cache,
                             const Eigen::MatrixXd& dlogits,
                             std::vector<double>& grad) const {
  grad.assign(theta_.size(), 0.0);
  const int nb = static_cast<int>(cfg_.conv_channels.size());
  const int n_img = batch.b * batch.t;
  const int feat = feature_dim();

  // Head.
  const MapConstRowMat hw_map(theta_.data() + head_w_off(), num_classes_, feat);
  MapRowMat dhw(grad.data() + head_w_off(), num_classes_, feat);
  Eigen::Map<Eigen::VectorXd> dhb(
      grad.data() + head_w_off() + static_cast<std::size_t>(num_classes_) * feat,
      num_classes_);
  dhw.noalias() = dlogits.transpose() * cache.features;
  dhb = dlogits.colwise().sum().transpose();
  Eigen::MatrixXd dfeat = dlogits * hw_map;  // (B, feat)

  // Global average pool backward.
  const int h_last = cache.hh[nb - 1];
  const int w_last = cache.ww[nb - 1];
  const std::size_t hw_last = static_cast<std::size_t>(h_last) * w_last;
  std::vector<double> dy(static_cast<std::size_t>(n_img) * feat * hw_last);
  const double inv = 1.0 / (static_cast<double>(batch.t) * hw_last);
  for (int bi = 0; bi < batch.b; ++bi) {
    for (int ch = 0; ch < feat; ++ch) {
      const double g = dfeat(bi, ch) * inv;
      for (int ti = 0; ti < batch.t; ++ti) {
        double* plane = dy.data() +
                        ((static_cast<std::size_t>(bi) * batch.t + ti) * feat + ch) *
                            hw_last;
        std::fill(plane, plane + hw_last, g);
      }
    }
  }

  Eigen::MatrixXd colbuf, dcol;
  for (int i = nb - 1; i >= 0; --i) {
    const int in_c = i == 0 ? cfg_.in_channels : cfg_.conv_channels[i - 1];
    const int out_c = cfg_.conv_channels[i];
    const int h = cache.hh[i];
    const int w = cache.ww[i];
    const std::size_t hw = static_cast<std::size_t>(h) * w;

    // ReLU mask (y holds post-relu activations).
    for (std::size_t p = 0; p < dy.size(); ++p) {
      if (cache.y[i][p] <= 0.0) dy[p] = 0.0;
    }

    const MapConstRowMat wm(theta_.data() + conv_w_off(i), out_c,
                            static_cast<Eigen::Index>(in_c) * 9);
    MapRowMat dwm(grad.data() + conv_w_off(i), out_c,
                  static_cast<Eigen::Index>(in_c) * 9);
    Eigen::Map<Eigen::VectorXd> dbv(grad.data() + conv_b_off(i), out_c);

    std::vector<double> dx(static_cast<std::size_t>(n_img) * in_c * hw);
    for (int n = 0; n < n_img; ++n) {
      im2col3x3(cache.x_in[i].data() + static_cast<std::size_t>(n) * in_c * hw,
                in_c, h, w, colbuf);
      const MapConstRowMat dzm(dy.data() + static_cast<std::size_t>(n) * out_c * hw,
                               out_c, static_cast<Eigen::Index>(hw));
      dwm.noalias() += dzm * colbuf.transpose();
      dbv += dzm.rowwise().sum();
      dcol.noalias() = wm.transpose() * dzm;
      col2im3x3(dcol, in_c, h, w,
                dx.data() + static_cast<std::size_t>(n) * in_c * hw);
    }

    if (i == cfg_.shift_block) {
      const int k = shift_channels(in_c, cfg_.shift_fraction);
      std::vector<double> unshifted;
      shift_apply(dx, batch.b, batch.t, in_c, h, w, k, true, unshifted);
      dx = std::move(unshifted);
    }

    if (i > 0) {
      // dx is the gradient at block i's input == pooled output of block i-1.
      avgpool2_backward(dx, n_img, in_c, cache.hh[i - 1], cache.ww[i - 1], dy);
    }
  }
}

VideoNet::LossGrad VideoNet::training_loss_and_grad(const Batch& batch,
                                                    double lambda_distill,
                                                    double temperature) const {
  ForwardCache cache;
  Eigen::MatrixXd logits, features;
  forward_impl(theta_, num_classes_, batch, &cache, logits, features);
  Eigen::MatrixXd dlogits;
  LossGrad out;
  out.loss = loss_terms(batch, logits, lambda_distill, temperature, &dlogits);
  backward_impl(batch, cache, dlogits, out.grad);
  out.logits = std::move(logits);
  return out;
}

void VideoNet::apply_gradient(const std::vector<double>& grad,
                              double learning_rate) {
  if (grad.size() != theta_.size()) {
    throw std::invalid_argument("apply_gradient: size mismatch");
  }
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    theta_[i] -= learning_rate * grad[i];
  }
}

void VideoNet::set_snapshot() {
  snapshot_ = Snapshot{theta_, num_classes_};
}

int VideoNet::snapshot_classes() const {
  return snapshot_ ? snapshot_->num_classes : 0;
}

std::uint64_t VideoNet::snapshot_hash() const {
  if (!snapshot_) throw std::logic_error("snapshot_hash: no snapshot");
  std::uint64_t h = fnv1a64_bytes(snapshot_->theta.data(),
                                  snapshot_->theta.size() * sizeof(double));
  return fnv1a64_bytes(&snapshot_->num_classes, sizeof(int), h);
}

std::uint64_t VideoNet::param_hash() const {
  std::uint64_t h = fnv1a64_bytes(theta_.data(), theta_.size() * sizeof(double));
  return fnv1a64_bytes(&num_classes_, sizeof(int), h);
}

void VideoNet::save(const std::filesystem::path& stem) const {
  nlohmann::json manifest;
  manifest["format_version"] = kCheckpointVersion;
  manifest["in_channels"] = cfg_.in_channels;
  manifest["conv_channels"] = cfg_.conv_channels;
  manifest["shift_block"] = cfg_.shift_block;
  manifest["shift_fraction"] = cfg_.shift_fraction;
  manifest["head_init_scale"] = cfg_.head_init_scale;
  manifest["num_classes"] = num_classes_;
  manifest["seed"] = seed_;
  manifest["param_count"] = theta_.size();
  manifest["param_hash"] = param_hash();

  std::filesystem::path jpath = stem;
  jpath += ".json";
  std::filesystem::path bpath = stem;
  bpath += ".bin";
  if (stem.has_parent_path()) {
    std::filesystem::create_directories(stem.parent_path());
  }
  std::ofstream(jpath) << manifest.dump(2) << "\n";
  std::ofstream blob(bpath, std::ios::binary);
  blob.write(reinterpret_cast<const char*>(theta_.data()),
             static_cast<std::streamsize>(theta_.size() * sizeof(double)));
}

VideoNet VideoNet::load(const std::filesystem::path& stem) {
  std::filesystem::path jpath = stem;
  jpath += ".json";
  std::filesystem::path bpath = stem;
  bpath += ".bin";
  std::ifstream jin(jpath);
  if (!jin) {
    throw std::runtime_error("checkpoint manifest not found: " + jpath.string());
  }
  nlohmann::json manifest = nlohmann::json::parse(jin);
  if (manifest.at("format_version").get<int>() != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported format version");
  }
  ModelConfig cfg;
  cfg.in_channels = manifest.at("in_channels").get<int>();
  cfg.conv_channels = manifest.at("conv_channels").get<std::vector<int>>();
  cfg.shift_block = manifest.at("shift_block").get<int>();
  cfg.shift_fraction = manifest.at("shift_fraction").get<double>();
  cfg.head_init_scale = manifest.at("head_init_scale").get<double>();

  VideoNet net(cfg, manifest.at("seed").get<std::uint64_t>());
  net.num_classes_ = manifest.at("num_classes").get<int>();
  const std::size_t count = manifest.at("param_count").get<std::size_t>();
  net.theta_.resize(count);
  std::ifstream blob(bpath, std::ios::binary);
  if (!blob) {
    throw std::runtime_error("checkpoint blob not found: " + bpath.string());
  }
  blob.read(reinterpret_cast<char*>(net.theta_.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  if (!blob) {
    throw std::runtime_error("checkpoint blob truncated: " + bpath.string());
  }
  if (net.param_hash() != manifest.at("param_hash").get<std::uint64_t>()) {
    throw std::runtime_error("checkpoint hash mismatch: " + bpath.string());
  }
  return net;
}

}  // namespace snro
