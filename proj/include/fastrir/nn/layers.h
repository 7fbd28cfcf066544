// Copyright 2026 The fastrir Authors. All Rights Reserved.
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

#ifndef FASTRIR_NN_LAYERS_H_
#define FASTRIR_NN_LAYERS_H_

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fastrir/nn/kernels.h"
#include "fastrir/nn/tensor.h"
#include "fastrir/rng.h"

namespace fastrir::nn {

template <typename T>
struct Param {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Param(std::string n, std::vector<int> shape)
      : name(std::move(n)), value(shape), grad(shape) {}
};

// A differentiable stage. forward() caches what backward() needs;
// backward() accumulates parameter gradients and returns the input gradient.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<T> forward(const Tensor<T>& x, bool training) = 0;
  virtual Tensor<T> backward(const Tensor<T>& dy) = 0;
  virtual std::vector<Param<T>*> params() { return {}; }
  // Non-trainable state saved in checkpoints (normalization statistics).
  virtual std::vector<std::pair<std::string, Tensor<T>*>> buffers() {
    return {};
  }
  virtual std::string kind() const = 0;
  // Prefixes parameter and buffer names, e.g. "gen.3.".
  virtual void set_prefix(const std::string& prefix) { prefix_ = prefix; }

 protected:
  std::string prefix_;
};

// Weight initializer shared by every layer: N(0, 0.02) weights, zero bias,
// N(1, 0.02) normalization scale.
inline constexpr double kInitStd = 0.02;

template <typename T>
void init_normal(Tensor<T>& t, Rng& rng, double mean, double stddev) {
  for (auto& v : t.vec()) v = static_cast<T>(mean + stddev * rng.normal());
}

template <typename T>
class Linear : public Layer<T> {
 public:
  Linear(int in, int out, Rng& rng)
      : in_(in), out_(out), weight_("weight", {out, in}), bias_("bias", {out}) {
    init_normal(weight_.value, rng, 0.0, kInitStd);
  }

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    if (x.rank() != 2 || x.dim(1) != in_) {
      throw ConfigError("linear expects (batch, " + std::to_string(in_) +
                        "), got " + shape_string(x.shape()));
    }
    input_ = x;
    Tensor<T> y({x.dim(0), out_});
    kernels::linear_forward(x.dim(0), in_, out_, x.data(),
                            weight_.value.data(), bias_.value.data(), y.data());
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    Tensor<T> dx(input_.shape());
    kernels::linear_backward(input_.dim(0), in_, out_, input_.data(),
                             weight_.value.data(), dy.data(), dx.data(),
                             weight_.grad.data(), bias_.grad.data());
    return dx;
  }

  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }
  std::string kind() const override { return "linear"; }
  void set_prefix(const std::string& p) override {
    weight_.name = p + "weight";
    bias_.name = p + "bias";
  }

 private:
  int in_, out_;
  Param<T> weight_, bias_;
  Tensor<T> input_;
};

struct ConvConfig {
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 1;
  int stride = 1;
  int padding = 0;
  int output_padding = 0;  // transposed only
};

template <typename T>
class Conv1d : public Layer<T> {
 public:
  Conv1d(const ConvConfig& c, Rng& rng)
      : cfg_(c),
        weight_("weight", {c.out_channels, c.in_channels, c.kernel}),
        bias_("bias", {c.out_channels}) {
    init_normal(weight_.value, rng, 0.0, kInitStd);
  }

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    if (x.rank() != 3 || x.dim(1) != cfg_.in_channels) {
      throw ConfigError("conv1d expects " + std::to_string(cfg_.in_channels) +
                        " channels, got " + shape_string(x.shape()));
    }
    input_ = x;
    shape_ = make_shape(x);
    Tensor<T> y({shape_.batch, cfg_.out_channels, shape_.out_length});
    kernels::conv1d_forward(shape_, x.data(), weight_.value.data(),
                            bias_.value.data(), y.data());
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    Tensor<T> dx(input_.shape());
    kernels::conv1d_backward(shape_, input_.data(), weight_.value.data(),
                             dy.data(), dx.data(), weight_.grad.data(),
                             bias_.grad.data());
    return dx;
  }

  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }
  std::string kind() const override { return "conv1d"; }
  void set_prefix(const std::string& p) override {
    weight_.name = p + "weight";
    bias_.name = p + "bias";
  }

 private:
  kernels::ConvShape make_shape(const Tensor<T>& x) const {
    kernels::ConvShape s;
    s.batch = x.dim(0);
    s.in_channels = cfg_.in_channels;
    s.out_channels = cfg_.out_channels;
    s.kernel = cfg_.kernel;
    s.stride = cfg_.stride;
    s.padding = cfg_.padding;
    s.in_length = x.dim(2);
    s.out_length = kernels::conv_out_length(x.dim(2), cfg_.kernel, cfg_.stride,
                                            cfg_.padding);
    return s;
  }

  ConvConfig cfg_;
  Param<T> weight_, bias_;
  Tensor<T> input_;
  kernels::ConvShape shape_;
};

template <typename T>
class ConvTranspose1d : public Layer<T> {
 public:
  ConvTranspose1d(const ConvConfig& c, Rng& rng)
      : cfg_(c),
        weight_("weight", {c.in_channels, c.out_channels, c.kernel}),
        bias_("bias", {c.out_channels}) {
    init_normal(weight_.value, rng, 0.0, kInitStd);
  }

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    if (x.rank() != 3 || x.dim(1) != cfg_.in_channels) {
      throw ConfigError("conv_transpose1d expects " +
                        std::to_string(cfg_.in_channels) + " channels, got " +
                        shape_string(x.shape()));
    }
    input_ = x;
    shape_.batch = x.dim(0);
    shape_.in_channels = cfg_.in_channels;
    shape_.out_channels = cfg_.out_channels;
    shape_.kernel = cfg_.kernel;
    shape_.stride = cfg_.stride;
    shape_.padding = cfg_.padding;
    shape_.output_padding = cfg_.output_padding;
    shape_.in_length = x.dim(2);
    shape_.out_length = kernels::conv_transpose_out_length(
        x.dim(2), cfg_.kernel, cfg_.stride, cfg_.padding, cfg_.output_padding);
    Tensor<T> y({shape_.batch, cfg_.out_channels, shape_.out_length});
    kernels::conv_transpose1d_forward(shape_, x.data(), weight_.value.data(),
                                      bias_.value.data(), y.data());
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    Tensor<T> dx(input_.shape());
    kernels::conv_transpose1d_backward(shape_, input_.data(),
                                       weight_.value.data(), dy.data(),
                                       dx.data(), weight_.grad.data(),
                                       bias_.grad.data());
    return dx;
  }

  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }
  std::string kind() const override { return "conv_transpose1d"; }
  void set_prefix(const std::string& p) override {
    weight_.name = p + "weight";
    bias_.name = p + "bias";
  }

 private:
  ConvConfig cfg_;
  Param<T> weight_, bias_;
  Tensor<T> input_;
  kernels::ConvShape shape_;
};

// Per-channel normalization over batch and length. Accepts (N, C, L) or
// (N, C). Inference mode uses the running statistics.
template <typename T>
class BatchNorm1d : public Layer<T> {
 public:
  BatchNorm1d(int channels, Rng& rng, double momentum = 0.1, double eps = 1e-5)
      : channels_(channels),
        momentum_(momentum),
        eps_(eps),
        gamma_("weight", {channels}),
        beta_("bias", {channels}),
        running_mean_({channels}, T(0)),
        running_var_({channels}, T(1)) {
    init_normal(gamma_.value, rng, 1.0, kInitStd);
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) override {
    if (x.rank() < 2 || x.dim(1) != channels_) {
      throw ConfigError("batch norm expects " + std::to_string(channels_) +
                        " channels, got " + shape_string(x.shape()));
    }
    const int n = x.dim(0);
    const int len = x.rank() == 3 ? x.dim(2) : 1;
    const long m = static_cast<long>(n) * len;
    training_ = training;
    input_shape_ = x.shape();
    xhat_ = Tensor<T>(x.shape());
    inv_std_.assign(channels_, T(0));
    Tensor<T> y(x.shape());
    for (int c = 0; c < channels_; ++c) {
      T mean, var;
      if (training) {
        if (m < 2) throw ConfigError("batch norm needs >= 2 values per channel");
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          const T* row = x.data() + (static_cast<long>(i) * channels_ + c) * len;
          for (int p = 0; p < len; ++p) acc += row[p];
        }
        mean = static_cast<T>(acc / m);
        double sq = 0.0;
        for (int i = 0; i < n; ++i) {
          const T* row = x.data() + (static_cast<long>(i) * channels_ + c) * len;
          for (int p = 0; p < len; ++p) {
            const double d = row[p] - mean;
            sq += d * d;
          }
        }
        var = static_cast<T>(sq / m);
        running_mean_[c] = static_cast<T>((1 - momentum_) * running_mean_[c] +
                                          momentum_ * mean);
        running_var_[c] = static_cast<T>((1 - momentum_) * running_var_[c] +
                                         momentum_ * sq / (m - 1));
      } else {
        mean = running_mean_[c];
        var = running_var_[c];
      }
      const T inv = static_cast<T>(1.0 / std::sqrt(static_cast<double>(var) + eps_));
      inv_std_[c] = inv;
      for (int i = 0; i < n; ++i) {
        const long off = (static_cast<long>(i) * channels_ + c) * len;
        for (int p = 0; p < len; ++p) {
          const T xh = (x[off + p] - mean) * inv;
          xhat_[off + p] = xh;
          y[off + p] = gamma_.value[c] * xh + beta_.value[c];
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    const int n = input_shape_[0];
    const int len = input_shape_.size() == 3 ? input_shape_[2] : 1;
    const double m = static_cast<double>(n) * len;
    Tensor<T> dx(input_shape_);
    for (int c = 0; c < channels_; ++c) {
      double sum_dy = 0.0, sum_dy_xhat = 0.0;
      for (int i = 0; i < n; ++i) {
        const long off = (static_cast<long>(i) * channels_ + c) * len;
        for (int p = 0; p < len; ++p) {
          sum_dy += dy[off + p];
          sum_dy_xhat += dy[off + p] * xhat_[off + p];
        }
      }
      gamma_.grad[c] += static_cast<T>(sum_dy_xhat);
      beta_.grad[c] += static_cast<T>(sum_dy);
      const double g = gamma_.value[c];
      const double inv = inv_std_[c];
      for (int i = 0; i < n; ++i) {
        const long off = (static_cast<long>(i) * channels_ + c) * len;
        for (int p = 0; p < len; ++p) {
          if (training_) {
            dx[off + p] = static_cast<T>(
                g * inv / m *
                (m * dy[off + p] - sum_dy - xhat_[off + p] * sum_dy_xhat));
          } else {
            dx[off + p] = static_cast<T>(g * inv * dy[off + p]);
          }
        }
      }
    }
    return dx;
  }

  std::vector<Param<T>*> params() override { return {&gamma_, &beta_}; }
  std::vector<std::pair<std::string, Tensor<T>*>> buffers() override {
    return {{mean_name_, &running_mean_}, {var_name_, &running_var_}};
  }
  std::string kind() const override { return "batch_norm1d"; }
  void set_prefix(const std::string& p) override {
    gamma_.name = p + "weight";
    beta_.name = p + "bias";
    mean_name_ = p + "running_mean";
    var_name_ = p + "running_var";
  }

 private:
  int channels_;
  double momentum_, eps_;
  Param<T> gamma_, beta_;
  Tensor<T> running_mean_, running_var_;
  std::string mean_name_ = "running_mean", var_name_ = "running_var";
  bool training_ = true;
  std::vector<int> input_shape_;
  Tensor<T> xhat_;
  std::vector<T> inv_std_;
};

template <typename T>
class ReLU : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    output_ = x;
    for (auto& v : output_.vec()) v = v > T(0) ? v : T(0);
    return output_;
  }
  Tensor<T> backward(const Tensor<T>& dy) override {
    Tensor<T> dx = dy;
    for (size_t i = 0; i < dx.size(); ++i) {
      if (!(output_[i] > T(0))) dx[i] = T(0);
    }
    return dx;
  }
  std::string kind() const override { return "relu"; }

 private:
  Tensor<T> output_;
};

template <typename T>
class LeakyReLU : public Layer<T> {
 public:
  explicit LeakyReLU(double slope = 0.2) : slope_(static_cast<T>(slope)) {}
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    input_ = x;
    Tensor<T> y = x;
    for (auto& v : y.vec()) v = v > T(0) ? v : slope_ * v;
    return y;
  }
  Tensor<T> backward(const Tensor<T>& dy) override {
    Tensor<T> dx = dy;
    for (size_t i = 0; i < dx.size(); ++i) {
      if (!(input_[i] > T(0))) dx[i] *= slope_;
    }
    return dx;
  }
  std::string kind() const override { return "leaky_relu"; }

 private:
  T slope_;
  Tensor<T> input_;
};

template <typename T>
class Tanh : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    output_ = x;
    for (auto& v : output_.vec()) v = std::tanh(v);
    return output_;
  }
  Tensor<T> backward(const Tensor<T>& dy) override {
    Tensor<T> dx = dy;
    for (size_t i = 0; i < dx.size(); ++i) {
      dx[i] *= T(1) - output_[i] * output_[i];
    }
    return dx;
  }
  std::string kind() const override { return "tanh"; }

 private:
  Tensor<T> output_;
};

template <typename T>
class Sigmoid : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    output_ = x;
    for (auto& v : output_.vec()) v = T(1) / (T(1) + std::exp(-v));
    return output_;
  }
  Tensor<T> backward(const Tensor<T>& dy) override {
    Tensor<T> dx = dy;
    for (size_t i = 0; i < dx.size(); ++i) {
      dx[i] *= output_[i] * (T(1) - output_[i]);
    }
    return dx;
  }
  std::string kind() const override { return "sigmoid"; }

 private:
  Tensor<T> output_;
};

// (N, features) <-> (N, channels, length)
template <typename T>
class Reshape : public Layer<T> {
 public:
  explicit Reshape(std::vector<int> item_shape) : item_shape_(std::move(item_shape)) {}
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    input_shape_ = x.shape();
    std::vector<int> shape{x.dim(0)};
    shape.insert(shape.end(), item_shape_.begin(), item_shape_.end());
    return x.reshaped(shape);
  }
  Tensor<T> backward(const Tensor<T>& dy) override {
    return dy.reshaped(input_shape_);
  }
  std::string kind() const override { return "reshape"; }

 private:
  std::vector<int> item_shape_;
  std::vector<int> input_shape_;
};

template <typename T>
class Sequential {
 public:
  void add(std::unique_ptr<Layer<T>> layer) {
    layer->set_prefix(prefix_ + std::to_string(layers_.size()) + ".");
    layers_.push_back(std::move(layer));
  }
  template <typename L, typename... Args>
  void emplace(Args&&... args) {
    add(std::make_unique<L>(std::forward<Args>(args)...));
  }

  void set_prefix(const std::string& prefix) {
    prefix_ = prefix;
    for (size_t i = 0; i < layers_.size(); ++i) {
      layers_[i]->set_prefix(prefix_ + std::to_string(i) + ".");
    }
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    Tensor<T> h = x;
    for (auto& l : layers_) h = l->forward(h, training);
    return h;
  }
  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> g = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
      g = (*it)->backward(g);
    }
    return g;
  }

  std::vector<Param<T>*> params() {
    std::vector<Param<T>*> out;
    for (auto& l : layers_) {
      for (auto* p : l->params()) out.push_back(p);
    }
    return out;
  }
  std::vector<std::pair<std::string, Tensor<T>*>> buffers() {
    std::vector<std::pair<std::string, Tensor<T>*>> out;
    for (auto& l : layers_) {
      for (auto& b : l->buffers()) out.push_back(b);
    }
    return out;
  }

  size_t size() const { return layers_.size(); }
  Layer<T>& layer(size_t i) { return *layers_[i]; }

 private:
  std::string prefix_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

}  // namespace fastrir::nn

#endif  // FASTRIR_NN_LAYERS_H_
