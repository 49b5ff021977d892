// Copyright 2026 the repshift authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define EIGEN_DONT_PARALLELIZE
#include <Eigen/Dense>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "repshift/error.hpp"
#include "repshift/layers.hpp"

namespace repshift::nn {

namespace {

std::atomic<int> g_max_threads{0};

using MatRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatCM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
using MapRM = Eigen::Map<MatRM>;
using CMapRM = Eigen::Map<const MatRM>;

int pooled_extent(int in, int kernel, int stride, int pad) {
  return (in + 2 * pad - kernel) / stride + 1;
}

// Column matrix for one sample: rows = in_c*k*k, cols = oh*ow, col-major.
void im2col(const float* x, const Shape& in, int kernel, int stride, int pad, int oh, int ow,
            MatCM& col) {
  const int k2 = kernel * kernel;
  for (int ic = 0; ic < in.c; ++ic) {
    const float* plane = x + static_cast<size_t>(ic) * in.h * in.w;
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx) {
        const int row = ic * k2 + ky * kernel + kx;
        for (int oy = 0; oy < oh; ++oy) {
          const int y = oy * stride + ky - pad;
          const bool y_ok = static_cast<unsigned>(y) < static_cast<unsigned>(in.h);
          for (int ox = 0; ox < ow; ++ox) {
            const int x0 = ox * stride + kx - pad;
            const bool ok = y_ok && static_cast<unsigned>(x0) < static_cast<unsigned>(in.w);
            col(row, oy * ow + ox) = ok ? plane[y * in.w + x0] : 0.0f;
          }
        }
      }
    }
  }
}

void col2im(const MatCM& col, const Shape& in, int kernel, int stride, int pad, int oh, int ow,
            float* dx) {
  std::fill(dx, dx + static_cast<size_t>(in.size()), 0.0f);
  const int k2 = kernel * kernel;
  for (int ic = 0; ic < in.c; ++ic) {
    float* plane = dx + static_cast<size_t>(ic) * in.h * in.w;
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx) {
        const int row = ic * k2 + ky * kernel + kx;
        for (int oy = 0; oy < oh; ++oy) {
          const int y = oy * stride + ky - pad;
          if (static_cast<unsigned>(y) >= static_cast<unsigned>(in.h)) continue;
          for (int ox = 0; ox < ow; ++ox) {
            const int x0 = ox * stride + kx - pad;
            if (static_cast<unsigned>(x0) >= static_cast<unsigned>(in.w)) continue;
            plane[y * in.w + x0] += col(row, oy * ow + ox);
          }
        }
      }
    }
  }
}

int clamp_threads(int work_items) {
  return std::max(1, std::min(max_threads(), work_items));
}

}  // namespace

void set_max_threads(int n) { g_max_threads.store(std::max(1, n)); }

int max_threads() {
  int n = g_max_threads.load();
  if (n > 0) return n;
#ifdef _OPENMP
  return std::max(1, omp_get_max_threads());
#else
  return 1;
#endif
}

// ---------------------------------------------------------------------------
// Conv2d
// ---------------------------------------------------------------------------

Conv2d::Conv2d(std::string name, int in_channels, int out_channels, int kernel, int stride, int pad)
    : in_c_(in_channels),
      out_c_(out_channels),
      kernel_(kernel),
      stride_(stride),
      pad_(pad),
      out_channels_(out_channels) {
  weight_.name = name + ".w";
  weight_.w.resize(static_cast<size_t>(out_c_) * in_c_ * kernel_ * kernel_, 0.0f);
  weight_.g.resize(weight_.w.size(), 0.0f);
  bias_.name = name + ".b";
  bias_.w.resize(out_c_, 0.0f);
  bias_.g.resize(out_c_, 0.0f);
}

Shape Conv2d::out_shape(const Shape& in) const {
  return {out_c_, pooled_extent(in.h, kernel_, stride_, pad_),
          pooled_extent(in.w, kernel_, stride_, pad_)};
}

void Conv2d::init_params(Rng& rng) {
  const double stddev = std::sqrt(2.0 / (static_cast<double>(in_c_) * kernel_ * kernel_));
  for (auto& v : weight_.w) v = static_cast<float>(rng.normal(0.0, stddev));
  std::fill(bias_.w.begin(), bias_.w.end(), 0.0f);
}

void Conv2d::collect_params(std::vector<ParamTensor*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

Tensor Conv2d::forward(const Tensor& x, Mode mode) {
  const Shape in = x.shape();
  const Shape out_s = out_shape(in);
  const int k_rows = in_c_ * kernel_ * kernel_;
  const int cols = out_s.h * out_s.w;
  Tensor y(x.batch(), out_s);

  if (mode != Mode::kInfer) cached_input_ = x;

  CMapRM w(weight_.w.data(), out_c_, k_rows);
  const int threads = clamp_threads(x.batch());
#pragma omp parallel num_threads(threads)
  {
    MatCM col(k_rows, cols);
#pragma omp for schedule(static)
    for (int i = 0; i < x.batch(); ++i) {
      im2col(x.sample(i), in, kernel_, stride_, pad_, out_s.h, out_s.w, col);
      MapRM out(y.sample(i), out_c_, cols);
      out.noalias() = w * col;
      for (int oc = 0; oc < out_c_; ++oc) out.row(oc).array() += bias_.w[oc];
    }
  }
  return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
  const Shape in = cached_input_.shape();
  const Shape out_s = out_shape(in);
  const int k_rows = in_c_ * kernel_ * kernel_;
  const int cols = out_s.h * out_s.w;
  Tensor dx(dy.batch(), in);

  CMapRM w(weight_.w.data(), out_c_, k_rows);
  const int threads = clamp_threads(dy.batch());
  std::vector<std::vector<float>> dw_parts(threads, std::vector<float>(weight_.w.size(), 0.0f));
  std::vector<std::vector<float>> db_parts(threads, std::vector<float>(bias_.w.size(), 0.0f));

#pragma omp parallel num_threads(threads)
  {
#ifdef _OPENMP
    const int tid = omp_get_thread_num();
#else
    const int tid = 0;
#endif
    MatCM col(k_rows, cols);
    MatCM dcol(k_rows, cols);
    MapRM dw(dw_parts[tid].data(), out_c_, k_rows);
#pragma omp for schedule(static)
    for (int i = 0; i < dy.batch(); ++i) {
      im2col(cached_input_.sample(i), in, kernel_, stride_, pad_, out_s.h, out_s.w, col);
      CMapRM g(dy.sample(i), out_c_, cols);
      dw.noalias() += g * col.transpose();
      for (int oc = 0; oc < out_c_; ++oc) db_parts[tid][oc] += g.row(oc).sum();
      dcol.noalias() = w.transpose() * g;
      col2im(dcol, in, kernel_, stride_, pad_, out_s.h, out_s.w, dx.sample(i));
    }
  }
  for (int t = 0; t < threads; ++t) {
    for (size_t j = 0; j < weight_.g.size(); ++j) weight_.g[j] += dw_parts[t][j];
    for (size_t j = 0; j < bias_.g.size(); ++j) bias_.g[j] += db_parts[t][j];
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Relu
// ---------------------------------------------------------------------------

Tensor Relu::forward(const Tensor& x, Mode mode) {
  Tensor y = x;
  for (auto& v : y.vec()) v = v > 0.0f ? v : 0.0f;
  if (mode != Mode::kInfer) cached_output_ = y;
  return y;
}

Tensor Relu::backward(const Tensor& dy) {
  Tensor dx = dy;
  const auto& y = cached_output_.vec();
  auto& g = dx.vec();
  for (size_t i = 0; i < g.size(); ++i) {
    if (y[i] <= 0.0f) g[i] = 0.0f;
  }
  return dx;
}

// ---------------------------------------------------------------------------
// MaxPool2d
// ---------------------------------------------------------------------------

Shape MaxPool2d::out_shape(const Shape& in) const {
  return {in.c, pooled_extent(in.h, kernel_, stride_, pad_), pooled_extent(in.w, kernel_, stride_, pad_)};
}

Tensor MaxPool2d::forward(const Tensor& x, Mode mode) {
  in_shape_ = x.shape();
  cached_batch_ = x.batch();
  const Shape out_s = out_shape(in_shape_);
  Tensor y(x.batch(), out_s);
  const bool keep = mode != Mode::kInfer;
  if (keep) argmax_.assign(y.size(), 0);

  const int threads = clamp_threads(x.batch());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (int i = 0; i < x.batch(); ++i) {
    const float* xs = x.sample(i);
    float* ys = y.sample(i);
    int* am = keep ? argmax_.data() + static_cast<size_t>(i) * y.sample_size() : nullptr;
    for (int c = 0; c < in_shape_.c; ++c) {
      const float* plane = xs + static_cast<size_t>(c) * in_shape_.h * in_shape_.w;
      for (int oy = 0; oy < out_s.h; ++oy) {
        for (int ox = 0; ox < out_s.w; ++ox) {
          float best = -std::numeric_limits<float>::infinity();
          int best_idx = 0;
          for (int ky = 0; ky < kernel_; ++ky) {
            const int yy = oy * stride_ + ky - pad_;
            if (static_cast<unsigned>(yy) >= static_cast<unsigned>(in_shape_.h)) continue;
            for (int kx = 0; kx < kernel_; ++kx) {
              const int xx = ox * stride_ + kx - pad_;
              if (static_cast<unsigned>(xx) >= static_cast<unsigned>(in_shape_.w)) continue;
              const float v = plane[yy * in_shape_.w + xx];
              if (v > best) {
                best = v;
                best_idx = yy * in_shape_.w + xx;
              }
            }
          }
          const size_t oi = (static_cast<size_t>(c) * out_s.h + oy) * out_s.w + ox;
          ys[oi] = best;
          if (keep) am[oi] = best_idx;
        }
      }
    }
  }
  return y;
}

Tensor MaxPool2d::backward(const Tensor& dy) {
  const Shape out_s = out_shape(in_shape_);
  Tensor dx(cached_batch_, in_shape_);
  const int threads = clamp_threads(cached_batch_);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (int i = 0; i < cached_batch_; ++i) {
    const float* gs = dy.sample(i);
    float* dxs = dx.sample(i);
    const int* am = argmax_.data() + static_cast<size_t>(i) * dy.sample_size();
    for (int c = 0; c < in_shape_.c; ++c) {
      float* plane = dxs + static_cast<size_t>(c) * in_shape_.h * in_shape_.w;
      const size_t base = static_cast<size_t>(c) * out_s.h * out_s.w;
      for (int o = 0; o < out_s.h * out_s.w; ++o) {
        plane[am[base + o]] += gs[base + o];
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------
// AvgPool2d
// ---------------------------------------------------------------------------

Shape AvgPool2d::out_shape(const Shape& in) const {
  return {in.c, pooled_extent(in.h, kernel_, stride_, 0), pooled_extent(in.w, kernel_, stride_, 0)};
}

Tensor AvgPool2d::forward(const Tensor& x, Mode mode) {
  in_shape_ = x.shape();
  cached_batch_ = x.batch();
  const Shape out_s = out_shape(in_shape_);
  Tensor y(x.batch(), out_s);
  const float inv = 1.0f / static_cast<float>(kernel_ * kernel_);
  for (int i = 0; i < x.batch(); ++i) {
    const float* xs = x.sample(i);
    float* ys = y.sample(i);
    for (int c = 0; c < in_shape_.c; ++c) {
      const float* plane = xs + static_cast<size_t>(c) * in_shape_.h * in_shape_.w;
      for (int oy = 0; oy < out_s.h; ++oy) {
        for (int ox = 0; ox < out_s.w; ++ox) {
          float sum = 0.0f;
          for (int ky = 0; ky < kernel_; ++ky)
            for (int kx = 0; kx < kernel_; ++kx)
              sum += plane[(oy * stride_ + ky) * in_shape_.w + ox * stride_ + kx];
          ys[(static_cast<size_t>(c) * out_s.h + oy) * out_s.w + ox] = sum * inv;
        }
      }
    }
  }
  return y;
}

Tensor AvgPool2d::backward(const Tensor& dy) {
  const Shape out_s = out_shape(in_shape_);
  Tensor dx(cached_batch_, in_shape_);
  const float inv = 1.0f / static_cast<float>(kernel_ * kernel_);
  for (int i = 0; i < cached_batch_; ++i) {
    const float* gs = dy.sample(i);
    float* dxs = dx.sample(i);
    for (int c = 0; c < in_shape_.c; ++c) {
      float* plane = dxs + static_cast<size_t>(c) * in_shape_.h * in_shape_.w;
      for (int oy = 0; oy < out_s.h; ++oy) {
        for (int ox = 0; ox < out_s.w; ++ox) {
          const float g = gs[(static_cast<size_t>(c) * out_s.h + oy) * out_s.w + ox] * inv;
          for (int ky = 0; ky < kernel_; ++ky)
            for (int kx = 0; kx < kernel_; ++kx)
              plane[(oy * stride_ + ky) * in_shape_.w + ox * stride_ + kx] += g;
        }
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Dense
// ---------------------------------------------------------------------------

Dense::Dense(std::string name, int in_features, int out_features)
    : in_features_(in_features), out_features_(out_features) {
  weight_.name = name + ".w";
  weight_.w.resize(static_cast<size_t>(out_features_) * in_features_, 0.0f);
  weight_.g.resize(weight_.w.size(), 0.0f);
  bias_.name = name + ".b";
  bias_.w.resize(out_features_, 0.0f);
  bias_.g.resize(out_features_, 0.0f);
}

void Dense::init_params(Rng& rng) {
  const double stddev = std::sqrt(2.0 / static_cast<double>(in_features_));
  for (auto& v : weight_.w) v = static_cast<float>(rng.normal(0.0, stddev));
  std::fill(bias_.w.begin(), bias_.w.end(), 0.0f);
}

void Dense::collect_params(std::vector<ParamTensor*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

Tensor Dense::forward(const Tensor& x, Mode mode) {
  if (x.shape().size() != in_features_) {
    throw Error(ErrorCode::internal, "dense layer fed " + std::to_string(x.shape().size()) +
                                         " features, expected " + std::to_string(in_features_));
  }
  if (mode != Mode::kInfer) cached_input_ = x;
  Tensor y(x.batch(), {out_features_, 1, 1});
  CMapRM xm(x.data(), x.batch(), in_features_);
  CMapRM w(weight_.w.data(), out_features_, in_features_);
  MapRM ym(y.data(), y.batch(), out_features_);
  ym.noalias() = xm * w.transpose();
  for (int j = 0; j < out_features_; ++j) ym.col(j).array() += bias_.w[j];
  return y;
}

Tensor Dense::backward(const Tensor& dy) {
  Tensor dx(dy.batch(), cached_input_.shape());
  CMapRM gm(dy.data(), dy.batch(), out_features_);
  CMapRM xm(cached_input_.data(), dy.batch(), in_features_);
  CMapRM w(weight_.w.data(), out_features_, in_features_);
  MapRM dwm(weight_.g.data(), out_features_, in_features_);
  dwm.noalias() += gm.transpose() * xm;
  for (int j = 0; j < out_features_; ++j) bias_.g[j] += gm.col(j).sum();
  MapRM dxm(dx.data(), dy.batch(), in_features_);
  dxm.noalias() = gm * w;
  return dx;
}

// ---------------------------------------------------------------------------
// Dropout (inverted scaling, active only in kTrain)
// ---------------------------------------------------------------------------

Tensor Dropout::forward(const Tensor& x, Mode mode) {
  if (mode != Mode::kTrain || rate_ <= 0.0) {
    identity_ = true;
    return x;
  }
  identity_ = false;
  const float keep = static_cast<float>(1.0 - rate_);
  const float scale = 1.0f / keep;
  mask_.resize(x.size());
  Tensor y = x;
  for (size_t i = 0; i < mask_.size(); ++i) {
    mask_[i] = rng_.next_double() < rate_ ? 0.0f : scale;
    y.vec()[i] *= mask_[i];
  }
  return y;
}

Tensor Dropout::backward(const Tensor& dy) {
  if (identity_) return dy;
  Tensor dx = dy;
  for (size_t i = 0; i < mask_.size(); ++i) dx.vec()[i] *= mask_[i];
  return dx;
}

// ---------------------------------------------------------------------------
// Flatten
// ---------------------------------------------------------------------------

Tensor Flatten::forward(const Tensor& x, Mode mode) {
  in_shape_ = x.shape();
  return x.reshaped({in_shape_.size(), 1, 1});
}

Tensor Flatten::backward(const Tensor& dy) { return dy.reshaped(in_shape_); }

// ---------------------------------------------------------------------------
// Inception
// ---------------------------------------------------------------------------

Inception::Inception(std::string name, int in_channels, int b1_out, int b2_reduce, int b2_out,
                     int b3_reduce, int b3_out, int b4_out) {
  auto conv = [&](const std::string& suffix, int ic, int oc, int k, int pad) {
    return std::make_unique<Conv2d>(name + "." + suffix, ic, oc, k, 1, pad);
  };
  branches_.resize(4);
  branches_[0].push_back(conv("b1", in_channels, b1_out, 1, 0));
  branches_[0].push_back(std::make_unique<Relu>());

  branches_[1].push_back(conv("b2_reduce", in_channels, b2_reduce, 1, 0));
  branches_[1].push_back(std::make_unique<Relu>());
  branches_[1].push_back(conv("b2", b2_reduce, b2_out, 3, 1));
  branches_[1].push_back(std::make_unique<Relu>());

  branches_[2].push_back(conv("b3_reduce", in_channels, b3_reduce, 1, 0));
  branches_[2].push_back(std::make_unique<Relu>());
  branches_[2].push_back(conv("b3", b3_reduce, b3_out, 5, 2));
  branches_[2].push_back(std::make_unique<Relu>());

  branches_[3].push_back(std::make_unique<MaxPool2d>(3, 1, 1));
  branches_[3].push_back(conv("b4", in_channels, b4_out, 1, 0));
  branches_[3].push_back(std::make_unique<Relu>());

  branch_channels_ = {b1_out, b2_out, b3_out, b4_out};
  out_channels_ = b1_out + b2_out + b3_out + b4_out;
}

Inception::Inception(const Inception& other)
    : branch_channels_(other.branch_channels_), out_channels_(other.out_channels_) {
  branches_.resize(other.branches_.size());
  for (size_t b = 0; b < other.branches_.size(); ++b) {
    for (const auto& layer : other.branches_[b]) branches_[b].push_back(layer->clone());
  }
}

Shape Inception::out_shape(const Shape& in) const { return {out_channels_, in.h, in.w}; }

Tensor Inception::forward(const Tensor& x, Mode mode) {
  const Shape out_s = out_shape(x.shape());
  Tensor y(x.batch(), out_s);
  int c_offset = 0;
  for (size_t b = 0; b < branches_.size(); ++b) {
    Tensor t = x;
    for (auto& layer : branches_[b]) t = layer->forward(t, mode);
    const int bc = branch_channels_[b];
    const size_t plane = static_cast<size_t>(out_s.h) * out_s.w;
    for (int i = 0; i < x.batch(); ++i) {
      std::copy(t.sample(i), t.sample(i) + static_cast<size_t>(bc) * plane,
                y.sample(i) + static_cast<size_t>(c_offset) * plane);
    }
    c_offset += bc;
  }
  return y;
}

Tensor Inception::backward(const Tensor& dy) {
  const Shape out_s = dy.shape();
  const Shape in_s = {0, out_s.h, out_s.w};  // true input shape recovered from branch dx
  Tensor dx;
  int c_offset = 0;
  for (size_t b = 0; b < branches_.size(); ++b) {
    const int bc = branch_channels_[b];
    Tensor g(dy.batch(), {bc, out_s.h, out_s.w});
    const size_t plane = static_cast<size_t>(out_s.h) * out_s.w;
    for (int i = 0; i < dy.batch(); ++i) {
      std::copy(dy.sample(i) + static_cast<size_t>(c_offset) * plane,
                dy.sample(i) + static_cast<size_t>(c_offset + bc) * plane, g.sample(i));
    }
    for (size_t l = branches_[b].size(); l-- > 0;) g = branches_[b][l]->backward(g);
    if (dx.size() == 0) {
      dx = g;
    } else {
      for (size_t j = 0; j < dx.size(); ++j) dx.vec()[j] += g.vec()[j];
    }
    c_offset += bc;
  }
  (void)in_s;
  return dx;
}

void Inception::collect_params(std::vector<ParamTensor*>& out) {
  for (auto& branch : branches_)
    for (auto& layer : branch) layer->collect_params(out);
}

void Inception::init_params(Rng& rng) {
  for (auto& branch : branches_)
    for (auto& layer : branch) layer->init_params(rng);
}

void Inception::add_census(LayerCensus& c) const {
  ++c.inception;
  for (const auto& branch : branches_)
    for (const auto& layer : branch) layer->add_census(c);
}

// ---------------------------------------------------------------------------
// Softmax cross-entropy
// ---------------------------------------------------------------------------

LossResult softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
  const int n = logits.batch();
  const int classes = logits.shape().size();
  if (static_cast<size_t>(n) != labels.size()) {
    throw Error(ErrorCode::internal, "label count does not match batch size");
  }
  LossResult res;
  res.dlogits = Tensor(n, logits.shape());
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    const float* z = logits.sample(i);
    float* d = res.dlogits.sample(i);
    double m = z[0];
    int arg = 0;
    for (int c = 1; c < classes; ++c) {
      if (z[c] > m) {
        m = z[c];
        arg = c;
      }
    }
    double sum = 0.0;
    for (int c = 0; c < classes; ++c) sum += std::exp(static_cast<double>(z[c]) - m);
    const double log_sum = std::log(sum);
    const int y = labels[i];
    loss += -(static_cast<double>(z[y]) - m - log_sum);
    if (arg == y) ++res.correct;
    for (int c = 0; c < classes; ++c) {
      const double p = std::exp(static_cast<double>(z[c]) - m - log_sum);
      d[c] = static_cast<float>((p - (c == y ? 1.0 : 0.0)) / n);
    }
  }
  res.loss = loss / n;
  return res;
}

}  // namespace repshift::nn
