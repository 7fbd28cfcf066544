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

#include <gtest/gtest.h>

#include <vector>

#include "fastrir/nn/gradcheck.h"
#include "fastrir/nn/kernels.h"
#include "fastrir/nn/layers.h"
#include "fastrir/rng.h"
#include "oracles.h"

namespace fastrir::nn {
namespace {

using fastrir::testing::random_tensor;

std::vector<double> random_vec(size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct ConvCase {
  int batch, cin, cout, k, stride, pad, opad, len;
};

class KernelParity : public ::testing::TestWithParam<ConvCase> {};

TEST_P(KernelParity, ConvMatchesSerial) {
  const ConvCase c = GetParam();
  Rng rng(11);
  kernels::ConvShape s{c.batch, c.cin, c.cout, c.k, c.stride, c.pad, 0, c.len,
                       kernels::conv_out_length(c.len, c.k, c.stride, c.pad)};
  auto x = random_vec(static_cast<size_t>(c.batch) * c.cin * c.len, rng);
  auto w = random_vec(static_cast<size_t>(c.cout) * c.cin * c.k, rng);
  auto b = random_vec(c.cout, rng);
  const size_t ny = static_cast<size_t>(c.batch) * c.cout * s.out_length;
  std::vector<double> y1(ny), y2(ny);
  kernels::conv1d_forward(s, x.data(), w.data(), b.data(), y1.data());
  kernels::serial::conv1d_forward(s, x.data(), w.data(), b.data(), y2.data());
  EXPECT_LT(max_abs_diff(y1, y2), 1e-10);

  auto dy = random_vec(ny, rng);
  std::vector<double> dx1(x.size()), dx2(x.size()), dw1(w.size()),
      dw2(w.size()), db1(b.size()), db2(b.size());
  kernels::conv1d_backward(s, x.data(), w.data(), dy.data(), dx1.data(),
                           dw1.data(), db1.data());
  kernels::serial::conv1d_backward(s, x.data(), w.data(), dy.data(), dx2.data(),
                                   dw2.data(), db2.data());
  EXPECT_LT(max_abs_diff(dx1, dx2), 1e-10);
  EXPECT_LT(max_abs_diff(dw1, dw2), 1e-9);
  EXPECT_LT(max_abs_diff(db1, db2), 1e-10);
}

TEST_P(KernelParity, TransposedConvMatchesSerial) {
  const ConvCase c = GetParam();
  Rng rng(12);
  kernels::ConvShape s{c.batch, c.cin, c.cout, c.k, c.stride, c.pad, c.opad,
                       c.len,
                       kernels::conv_transpose_out_length(c.len, c.k, c.stride,
                                                          c.pad, c.opad)};
  auto x = random_vec(static_cast<size_t>(c.batch) * c.cin * c.len, rng);
  auto w = random_vec(static_cast<size_t>(c.cin) * c.cout * c.k, rng);
  auto b = random_vec(c.cout, rng);
  const size_t ny = static_cast<size_t>(c.batch) * c.cout * s.out_length;
  std::vector<double> y1(ny), y2(ny);
  kernels::conv_transpose1d_forward(s, x.data(), w.data(), b.data(), y1.data());
  kernels::serial::conv_transpose1d_forward(s, x.data(), w.data(), b.data(),
                                            y2.data());
  EXPECT_LT(max_abs_diff(y1, y2), 1e-10);

  auto dy = random_vec(ny, rng);
  std::vector<double> dx1(x.size()), dx2(x.size()), dw1(w.size()),
      dw2(w.size()), db1(b.size()), db2(b.size());
  kernels::conv_transpose1d_backward(s, x.data(), w.data(), dy.data(),
                                     dx1.data(), dw1.data(), db1.data());
  kernels::serial::conv_transpose1d_backward(s, x.data(), w.data(), dy.data(),
                                             dx2.data(), dw2.data(), db2.data());
  EXPECT_LT(max_abs_diff(dx1, dx2), 1e-10);
  EXPECT_LT(max_abs_diff(dw1, dw2), 1e-9);
  EXPECT_LT(max_abs_diff(db1, db2), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(
    Shapes, KernelParity,
    ::testing::Values(ConvCase{2, 3, 4, 41, 4, 19, 1, 16},
                      ConvCase{3, 2, 5, 3, 1, 1, 0, 9},
                      ConvCase{1, 1, 1, 5, 2, 0, 1, 7},
                      ConvCase{4, 8, 2, 41, 4, 19, 1, 64}));

TEST(Kernels, LengthArithmetic) {
  EXPECT_EQ(kernels::conv_out_length(4096, 41, 4, 19), 1024);
  EXPECT_EQ(kernels::conv_out_length(16, 41, 4, 19), 4);
  EXPECT_EQ(kernels::conv_transpose_out_length(4, 41, 4, 19, 1), 16);
  EXPECT_EQ(kernels::conv_transpose_out_length(1024, 41, 4, 19, 1), 4096);
}

TEST(Kernels, ConvAgainstHandComputedValues) {
  // x = [1 2 3], w = [1 0 -1], pad 1 -> y = [-2, -2, 2]
  kernels::ConvShape s{1, 1, 1, 3, 1, 1, 0, 3, 3};
  const double x[] = {1, 2, 3}, w[] = {1, 0, -1}, b[] = {0};
  double y[3];
  kernels::conv1d_forward(s, x, w, b, y);
  EXPECT_DOUBLE_EQ(y[0], -2);
  EXPECT_DOUBLE_EQ(y[1], -2);
  EXPECT_DOUBLE_EQ(y[2], 2);
}

TEST(Kernels, TransposedConvIsAdjointOfConv) {
  // <conv(x), y> == <x, convT(y)> with the same weights (zero bias)
  Rng rng(5);
  const int cin = 3, cout = 2, k = 41, stride = 4, pad = 19, len = 32;
  const int out_len = kernels::conv_out_length(len, k, stride, pad);
  kernels::ConvShape cs{2, cin, cout, k, stride, pad, 0, len, out_len};
  kernels::ConvShape ts{2, cout, cin, k, stride, pad, 1, out_len, len};
  auto x = random_vec(2 * cin * len, rng);
  auto y = random_vec(2 * cout * out_len, rng);
  auto w = random_vec(cout * cin * k, rng);
  std::vector<double> zero_out(cout, 0.0), zero_in(cin, 0.0);
  std::vector<double> cx(y.size()), ty(x.size());
  kernels::conv1d_forward(cs, x.data(), w.data(), zero_out.data(), cx.data());
  kernels::conv_transpose1d_forward(ts, y.data(), w.data(), zero_in.data(),
                                    ty.data());
  double lhs = 0, rhs = 0;
  for (size_t i = 0; i < y.size(); ++i) lhs += cx[i] * y[i];
  for (size_t i = 0; i < x.size(); ++i) rhs += x[i] * ty[i];
  EXPECT_NEAR(lhs, rhs, 1e-9 * std::abs(lhs));
}

TEST(Kernels, LinearMatchesSerial) {
  Rng rng(3);
  const int batch = 5, in = 10, out = 7;
  auto x = random_vec(batch * in, rng), w = random_vec(out * in, rng),
       b = random_vec(out, rng), dy = random_vec(batch * out, rng);
  std::vector<double> y1(batch * out), y2(batch * out);
  kernels::linear_forward(batch, in, out, x.data(), w.data(), b.data(), y1.data());
  kernels::serial::linear_forward(batch, in, out, x.data(), w.data(), b.data(),
                                  y2.data());
  EXPECT_LT(max_abs_diff(y1, y2), 1e-12);
  std::vector<double> dx1(x.size()), dx2(x.size()), dw1(w.size()),
      dw2(w.size()), db1(out), db2(out);
  kernels::linear_backward(batch, in, out, x.data(), w.data(), dy.data(),
                           dx1.data(), dw1.data(), db1.data());
  kernels::serial::linear_backward(batch, in, out, x.data(), w.data(), dy.data(),
                                   dx2.data(), dw2.data(), db2.data());
  EXPECT_LT(max_abs_diff(dx1, dx2), 1e-12);
  EXPECT_LT(max_abs_diff(dw1, dw2), 1e-12);
  EXPECT_LT(max_abs_diff(db1, db2), 1e-12);
}

TEST(GradCheck, Dense) {
  Rng rng(1);
  Linear<double> layer(10, 6, rng);
  auto r = gradient_check(layer, random_tensor({4, 10}, rng), true);
  EXPECT_LE(r.max_rel_error, 1e-6) << r.worst;
}

TEST(GradCheck, Conv1d) {
  Rng rng(2);
  Conv1d<double> layer({3, 4, 41, 4, 19, 0}, rng);
  auto r = gradient_check(layer, random_tensor({2, 3, 32}, rng), true);
  EXPECT_LE(r.max_rel_error, 1e-5) << r.worst;
}

TEST(GradCheck, TransposedConvKernel41Stride4) {
  Rng rng(3);
  ConvTranspose1d<double> layer({4, 3, 41, 4, 19, 1}, rng);
  auto r = gradient_check(layer, random_tensor({2, 4, 8}, rng), true);
  EXPECT_LE(r.max_rel_error, 1e-5) << r.worst;
}

TEST(GradCheck, BatchNormTraining) {
  Rng rng(4);
  BatchNorm1d<double> layer(3, rng);
  auto r = gradient_check(layer, random_tensor({4, 3, 5}, rng), true);
  EXPECT_LE(r.max_rel_error, 1e-5) << r.worst;
}

TEST(GradCheck, BatchNormDense) {
  Rng rng(5);
  BatchNorm1d<double> layer(6, rng);
  auto r = gradient_check(layer, random_tensor({5, 6}, rng), true);
  EXPECT_LE(r.max_rel_error, 1e-5) << r.worst;
}

TEST(GradCheck, Activations) {
  Rng rng(6);
  auto x = random_tensor({3, 2, 7}, rng);
  ReLU<double> relu;
  LeakyReLU<double> lrelu(0.2);
  Tanh<double> tanh_layer;
  Sigmoid<double> sigmoid;
  EXPECT_LE(gradient_check(relu, x, true).max_rel_error, 1e-6);
  EXPECT_LE(gradient_check(lrelu, x, true).max_rel_error, 1e-6);
  EXPECT_LE(gradient_check(tanh_layer, x, true).max_rel_error, 1e-6);
  EXPECT_LE(gradient_check(sigmoid, x, true).max_rel_error, 1e-6);
}

TEST(Layers, BatchNormRunningStatistics) {
  Rng rng(7);
  BatchNorm1d<double> bn(1, rng);
  Tensor<double> x({2, 1, 2}, std::vector<double>{1, 2, 3, 4});
  bn.forward(x, true);
  auto bufs = bn.buffers();
  // mean 2.5, unbiased var 5/3
  EXPECT_NEAR((*bufs[0].second)[0], 0.25, 1e-12);
  EXPECT_NEAR((*bufs[1].second)[0], 0.9 + 0.1 * 5.0 / 3.0, 1e-12);
}

TEST(Layers, ShapeMismatchIsConfigError) {
  Rng rng(8);
  Conv1d<double> conv({2, 3, 3, 1, 1, 0}, rng);
  EXPECT_THROW(conv.forward(Tensor<double>({1, 3, 8}), false), ConfigError);
  Linear<double> lin(10, 4, rng);
  EXPECT_THROW(lin.forward(Tensor<double>({1, 9}), false), ConfigError);
}

}  // namespace
}  // namespace fastrir::nn
