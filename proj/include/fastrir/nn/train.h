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

#ifndef FASTRIR_NN_TRAIN_H_
#define FASTRIR_NN_TRAIN_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fastrir/analysis.h"
#include "fastrir/env.h"
#include "fastrir/nn/gan.h"

namespace fastrir::nn {

// Scores are clamped to [eps, 1 - eps] before taking logs.
inline constexpr double kScoreEps = 1e-7;

struct LossValue {
  double value = 0.0;
  std::vector<double> grad;  // d value / d input
};

// mean log(1 - D(fake))
LossValue loss_cgan(std::span<const double> fake_scores);
// mean (generated - reference)^2 over every sample of every item
LossValue loss_mse(std::span<const double> generated,
                   std::span<const double> reference);

struct DiscriminatorLoss {
  // mean log D(real) + mean log(1 - D(fake)); the discriminator maximizes it
  double objective = 0.0;
  // Gradients of the minimized quantity, -objective.
  std::vector<double> grad_real;
  std::vector<double> grad_fake;
};
DiscriminatorLoss loss_discriminator(std::span<const double> real_scores,
                                     std::span<const double> fake_scores);

struct TrainConfig {
  int batch_size = 128;
  double learning_rate = 8e-5;
  double lr_decay_factor = 0.7;
  int lr_decay_every = 40;  // epochs
  double lambda_mse = 10.0;
  double lambda_t60 = 1.0;
  int epochs = 100;
  uint64_t seed = 0;
  double heldout_fraction = 0.1;
  int sample_rate = 16000;
  double rms_alpha = 0.99;
  double rms_eps = 1e-8;
  T60Options t60_options{};

  void validate() const;
};

// L_CGAN + lambda_mse * L_MSE + lambda_t60 * L_T60. Throws DivergenceError
// naming the first non-finite component.
double loss_generator(double cgan, double mse, double t60,
                      const TrainConfig& cfg);

// Learning rate in effect during (1-based) epoch `epoch`.
double learning_rate_at(const TrainConfig& cfg, int epoch);

template <typename T>
class RmsProp {
 public:
  RmsProp(std::vector<Param<T>*> params, double alpha, double eps);
  void zero_grad();
  void step(double lr);

 private:
  std::vector<Param<T>*> params_;
  std::vector<std::vector<double>> square_avg_;
  double alpha_, eps_;
};

// Generator objective for a batch of generated RIRs, with its gradient
// w.r.t. those RIRs (discriminator gradients are accumulated as a side
// effect and must be discarded by the caller).
template <typename T>
struct GeneratorObjective {
  double value = 0.0;
  double cgan = 0.0;
  double mse = 0.0;
  double t60 = 0.0;
  size_t t60_used = 0;
  Tensor<T> d_fake;
};

template <typename T>
GeneratorObjective<T> generator_objective(Discriminator<T>& disc,
                                          const Tensor<T>& fake,
                                          const Tensor<T>& embeddings,
                                          const Tensor<T>& reference,
                                          std::span<const double> t60_targets,
                                          const TrainConfig& cfg,
                                          bool training = true);

struct TrainingExample {
  EmbeddingVec embedding;
  std::vector<float> rir;
  double t60 = 0.0;  // target, seconds
};

struct EpochMetrics {
  int epoch = 0;  // 0 = before any update
  double lr = 0.0;
  double loss_g = 0.0;
  double loss_d = 0.0;  // discriminator objective (maximized)
  double loss_mse = 0.0;
  double loss_t60 = 0.0;
  double heldout_mse = 0.0;
  double heldout_t60_error = 0.0;
  size_t heldout_t60_used = 0;
};

struct TrainResult {
  std::vector<EpochMetrics> epochs;
  std::vector<size_t> heldout;  // corpus indices
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

// Alternating D/G updates with RMSprop. Deterministic for a fixed seed on
// one thread. On a non-finite loss the model is restored to the state at
// the start of the failing epoch and DivergenceError is thrown.
TrainResult train(GanModel<float>& model,
                  std::span<const TrainingExample> corpus,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

// Held-out style evaluation: generator in inference mode.
struct EvalMetrics {
  double mse = 0.0;
  double t60_error = 0.0;
  size_t t60_used = 0;
  std::vector<double> t60_estimates;
};
EvalMetrics evaluate_generator(GanModel<float>& model,
                               std::span<const TrainingExample> corpus,
                               std::span<const size_t> indices,
                               const TrainConfig& cfg);

std::string metrics_csv(std::span<const EpochMetrics> epochs);

}  // namespace fastrir::nn

#endif  // FASTRIR_NN_TRAIN_H_
