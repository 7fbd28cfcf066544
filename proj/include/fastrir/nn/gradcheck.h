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

#ifndef FASTRIR_NN_GRADCHECK_H_
#define FASTRIR_NN_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "fastrir/nn/layers.h"
#include "fastrir/rng.h"

namespace fastrir::nn {

inline constexpr double kFiniteDifferenceStep = 1e-5;

// |a - n| / max(|a|, |n|, floor)
inline double relative_error(double analytic, double numeric,
                             double floor = 1e-6) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;  // "<param name>[index]" or "input[index]"
  int checked = 0;
};

// Compares analytic gradients of `loss` against central differences.
// `loss` must run a forward pass and return the scalar; `backward` must
// leave gradients in every entry of `params` and return dL/dinput.
// At most `max_per_tensor` coordinates are probed per tensor.
inline void check_tensor(const std::string& name, Tensor<double>& value,
                         const Tensor<double>& analytic,
                         const std::function<double()>& loss,
                         int max_per_tensor, Rng& rng, GradCheckResult& out) {
  const size_t n = value.size();
  const int probes = static_cast<int>(std::min<size_t>(n, max_per_tensor));
  for (int p = 0; p < probes; ++p) {
    const size_t i = probes == static_cast<int>(n) ? p : rng.index(n);
    const double saved = value[i];
    value[i] = saved + kFiniteDifferenceStep;
    const double up = loss();
    value[i] = saved - kFiniteDifferenceStep;
    const double down = loss();
    value[i] = saved;
    const double numeric = (up - down) / (2 * kFiniteDifferenceStep);
    const double err = relative_error(analytic[i], numeric);
    ++out.checked;
    if (err > out.max_rel_error) {
      out.max_rel_error = err;
      out.worst = name + "[" + std::to_string(i) + "]";
    }
  }
}

// Gradient check for a single layer under the projection loss
// L = sum(r * layer(x)) with a fixed random r.
inline GradCheckResult gradient_check(Layer<double>& layer,
                                      Tensor<double> input, bool training,
                                      uint64_t seed = 7,
                                      int max_per_tensor = 64) {
  Rng rng(seed);
  Tensor<double> probe_out = layer.forward(input, training);
  Tensor<double> r(probe_out.shape());
  for (auto& v : r.vec()) v = rng.normal();

  auto loss = [&]() {
    Tensor<double> y = layer.forward(input, training);
    double acc = 0.0;
    for (size_t i = 0; i < y.size(); ++i) acc += r[i] * y[i];
    return acc;
  };

  for (auto* p : layer.params()) p->grad.fill(0.0);
  layer.forward(input, training);
  Tensor<double> dx = layer.backward(r);

  GradCheckResult result;
  std::vector<Tensor<double>> analytic;
  for (auto* p : layer.params()) analytic.push_back(p->grad);
  auto params = layer.params();
  for (size_t k = 0; k < params.size(); ++k) {
    check_tensor(params[k]->name, params[k]->value, analytic[k], loss,
                 max_per_tensor, rng, result);
  }
  check_tensor("input", input, dx, loss, max_per_tensor, rng, result);
  return result;
}

}  // namespace fastrir::nn

#endif  // FASTRIR_NN_GRADCHECK_H_
