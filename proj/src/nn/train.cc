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

#include "fastrir/nn/train.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fastrir/error.h"
#include "fastrir/rng.h"

namespace fastrir::nn {

namespace {

double clamp_score(double s) {
  return std::clamp(s, kScoreEps, 1.0 - kScoreEps);
}

bool clamped(double s) { return s < kScoreEps || s > 1.0 - kScoreEps; }

void require_scores(std::span<const double> s, const char* what) {
  if (s.empty()) throw ConfigError(std::string(what) + ": empty batch");
}

}  // namespace

LossValue loss_cgan(std::span<const double> fake_scores) {
  require_scores(fake_scores, "cgan loss");
  const double n = static_cast<double>(fake_scores.size());
  LossValue out;
  out.grad.resize(fake_scores.size());
  for (size_t i = 0; i < fake_scores.size(); ++i) {
    const double s = clamp_score(fake_scores[i]);
    out.value += std::log(1.0 - s);
    out.grad[i] = clamped(fake_scores[i]) ? 0.0 : -1.0 / ((1.0 - s) * n);
  }
  out.value /= n;
  return out;
}

LossValue loss_mse(std::span<const double> generated,
                   std::span<const double> reference) {
  if (generated.size() != reference.size()) {
    throw ConfigError("mse loss: shapes differ (" +
                      std::to_string(generated.size()) + " vs " +
                      std::to_string(reference.size()) + " samples)");
  }
  if (generated.empty()) throw ConfigError("mse loss: empty batch");
  const double n = static_cast<double>(generated.size());
  LossValue out;
  out.grad.resize(generated.size());
  for (size_t i = 0; i < generated.size(); ++i) {
    const double d = generated[i] - reference[i];
    out.value += d * d;
    out.grad[i] = 2.0 * d / n;
  }
  out.value /= n;
  return out;
}

DiscriminatorLoss loss_discriminator(std::span<const double> real_scores,
                                     std::span<const double> fake_scores) {
  require_scores(real_scores, "discriminator loss");
  require_scores(fake_scores, "discriminator loss");
  const double nr = static_cast<double>(real_scores.size());
  const double nf = static_cast<double>(fake_scores.size());
  DiscriminatorLoss out;
  out.grad_real.resize(real_scores.size());
  out.grad_fake.resize(fake_scores.size());
  double real_term = 0.0, fake_term = 0.0;
  for (size_t i = 0; i < real_scores.size(); ++i) {
    const double s = clamp_score(real_scores[i]);
    real_term += std::log(s);
    out.grad_real[i] = clamped(real_scores[i]) ? 0.0 : -1.0 / (s * nr);
  }
  for (size_t i = 0; i < fake_scores.size(); ++i) {
    const double s = clamp_score(fake_scores[i]);
    fake_term += std::log(1.0 - s);
    out.grad_fake[i] = clamped(fake_scores[i]) ? 0.0 : 1.0 / ((1.0 - s) * nf);
  }
  out.objective = real_term / nr + fake_term / nf;
  return out;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be > 0");
  if (!(lr_decay_factor > 0 && lr_decay_factor <= 1)) {
    throw ConfigError("lr_decay_factor must be in (0, 1]");
  }
  if (lr_decay_every < 1) throw ConfigError("lr_decay_every must be >= 1");
  if (lambda_mse < 0 || lambda_t60 < 0) {
    throw ConfigError("loss weights must be >= 0");
  }
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(heldout_fraction >= 0 && heldout_fraction < 1)) {
    throw ConfigError("heldout_fraction must be in [0, 1)");
  }
  if (sample_rate < 1) throw ConfigError("sample_rate must be >= 1");
  if (!(rms_alpha > 0 && rms_alpha < 1) || !(rms_eps > 0)) {
    throw ConfigError("rmsprop alpha must be in (0, 1) and eps > 0");
  }
}

double loss_generator(double cgan, double mse, double t60,
                      const TrainConfig& cfg) {
  if (!std::isfinite(cgan)) throw DivergenceError("cgan", "non-finite loss");
  if (!std::isfinite(mse)) throw DivergenceError("mse", "non-finite loss");
  if (!std::isfinite(t60)) throw DivergenceError("t60", "non-finite loss");
  return cgan + cfg.lambda_mse * mse + cfg.lambda_t60 * t60;
}

double learning_rate_at(const TrainConfig& cfg, int epoch) {
  return cfg.learning_rate *
         std::pow(cfg.lr_decay_factor, std::max(epoch, 0) / cfg.lr_decay_every);
}

template <typename T>
RmsProp<T>::RmsProp(std::vector<Param<T>*> params, double alpha, double eps)
    : params_(std::move(params)), alpha_(alpha), eps_(eps) {
  for (auto* p : params_) square_avg_.emplace_back(p->value.size(), 0.0);
}

template <typename T>
void RmsProp<T>::zero_grad() {
  for (auto* p : params_) p->grad.fill(T(0));
}

template <typename T>
void RmsProp<T>::step(double lr) {
  for (size_t k = 0; k < params_.size(); ++k) {
    auto& value = params_[k]->value;
    const auto& grad = params_[k]->grad;
    auto& avg = square_avg_[k];
    for (size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      avg[i] = alpha_ * avg[i] + (1.0 - alpha_) * g * g;
      value[i] -= static_cast<T>(lr * g / (std::sqrt(avg[i]) + eps_));
    }
  }
}

template <typename T>
GeneratorObjective<T> generator_objective(Discriminator<T>& disc,
                                          const Tensor<T>& fake,
                                          const Tensor<T>& embeddings,
                                          const Tensor<T>& reference,
                                          std::span<const double> t60_targets,
                                          const TrainConfig& cfg,
                                          bool training) {
  if (fake.shape() != reference.shape()) {
    throw ConfigError("generated batch " + shape_string(fake.shape()) +
                      " does not match reference " +
                      shape_string(reference.shape()));
  }
  const int batch = fake.dim(0);
  const size_t len = fake.size() / batch;
  if (t60_targets.size() != static_cast<size_t>(batch)) {
    throw ConfigError("t60 targets do not match batch size");
  }

  const Tensor<T> scores = disc.forward(fake, embeddings, training);
  const std::vector<double> s(scores.vec().begin(), scores.vec().end());
  const LossValue cgan = loss_cgan(s);

  const std::vector<double> g(fake.vec().begin(), fake.vec().end());
  const std::vector<double> r(reference.vec().begin(), reference.vec().end());
  const LossValue mse = loss_mse(g, r);

  std::vector<std::span<const double>> items;
  for (int n = 0; n < batch; ++n) {
    items.emplace_back(g.data() + n * len, len);
  }
  const T60LossResult t60 = t60_loss_differentiable(
      items, cfg.sample_rate, t60_targets, cfg.t60_options);

  GeneratorObjective<T> out;
  out.cgan = cgan.value;
  out.mse = mse.value;
  out.t60 = t60.value;
  out.t60_used = t60.used;
  out.value = loss_generator(cgan.value, mse.value, t60.value, cfg);

  Tensor<T> d_scores({batch});
  for (int n = 0; n < batch; ++n) d_scores[n] = static_cast<T>(cgan.grad[n]);
  out.d_fake = disc.backward(d_scores);
  for (int n = 0; n < batch; ++n) {
    for (size_t i = 0; i < len; ++i) {
      const size_t k = n * len + i;
      out.d_fake[k] += static_cast<T>(cfg.lambda_mse * mse.grad[k] +
                                      cfg.lambda_t60 * t60.grads[n][i]);
    }
  }
  return out;
}

namespace {

struct Snapshot {
  std::vector<std::vector<float>> params;
  std::vector<std::vector<float>> buffers;
};

Snapshot take_snapshot(GanModel<float>& m) {
  Snapshot s;
  for (auto* p : m.generator.params()) s.params.push_back(p->value.vec());
  for (auto* p : m.discriminator.params()) s.params.push_back(p->value.vec());
  for (auto& b : m.generator.buffers()) s.buffers.push_back(b.second->vec());
  for (auto& b : m.discriminator.buffers()) s.buffers.push_back(b.second->vec());
  return s;
}

void restore_snapshot(GanModel<float>& m, const Snapshot& s) {
  size_t i = 0, j = 0;
  for (auto* p : m.generator.params()) p->value.vec() = s.params[i++];
  for (auto* p : m.discriminator.params()) p->value.vec() = s.params[i++];
  for (auto& b : m.generator.buffers()) b.second->vec() = s.buffers[j++];
  for (auto& b : m.discriminator.buffers()) b.second->vec() = s.buffers[j++];
}

struct Batch {
  Tensor<float> embeddings;
  Tensor<float> reference;
  std::vector<double> targets;
};

Batch gather(std::span<const TrainingExample> corpus,
             std::span<const size_t> idx, int length) {
  Batch b;
  const int n = static_cast<int>(idx.size());
  b.embeddings = Tensor<float>({n, kEmbeddingSize});
  b.reference = Tensor<float>({n, 1, length});
  for (int k = 0; k < n; ++k) {
    const TrainingExample& ex = corpus[idx[k]];
    if (static_cast<int>(ex.rir.size()) != length) {
      throw ConfigError("training RIR " + std::to_string(idx[k]) + " has " +
                        std::to_string(ex.rir.size()) + " samples, model expects " +
                        std::to_string(length));
    }
    for (int i = 0; i < kEmbeddingSize; ++i) {
      b.embeddings[k * kEmbeddingSize + i] = static_cast<float>(ex.embedding[i]);
    }
    std::copy(ex.rir.begin(), ex.rir.end(),
              b.reference.data() + static_cast<long>(k) * length);
    b.targets.push_back(ex.t60);
  }
  return b;
}

void shuffle(std::vector<size_t>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
}

}  // namespace

EvalMetrics evaluate_generator(GanModel<float>& model,
                               std::span<const TrainingExample> corpus,
                               std::span<const size_t> indices,
                               const TrainConfig& cfg) {
  EvalMetrics m;
  if (indices.empty()) {
    m.mse = m.t60_error = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  const int length = model.topology.rir_length;
  double sq = 0.0;
  std::vector<Rir> generated;
  std::vector<double> targets;
  for (size_t start = 0; start < indices.size(); start += cfg.batch_size) {
    const size_t stop = std::min(indices.size(), start + cfg.batch_size);
    const Batch b = gather(corpus, indices.subspan(start, stop - start), length);
    const Tensor<float> out = model.generator.forward(b.embeddings, false);
    for (size_t k = 0; k < stop - start; ++k) {
      Rir rir;
      rir.sample_rate = cfg.sample_rate;
      rir.provenance = Provenance::kNeural;
      rir.samples.resize(length);
      for (int i = 0; i < length; ++i) {
        const double g = out[k * length + i];
        const double d = g - b.reference[k * length + i];
        sq += d * d;
        rir.samples[i] = g;
      }
      generated.push_back(std::move(rir));
      targets.push_back(b.targets[k]);
    }
  }
  m.mse = sq / (static_cast<double>(indices.size()) * length);
  const T60ErrorReport rep = t60_error(generated, targets, cfg.t60_options);
  m.t60_error = rep.mean_abs_error;
  m.t60_used = rep.used;
  m.t60_estimates = rep.estimates;
  return m;
}

TrainResult train(GanModel<float>& model,
                  std::span<const TrainingExample> corpus,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  const size_t n = corpus.size();
  if (n < 3) throw ConfigError("training corpus needs at least 3 examples");
  const int length = model.topology.rir_length;

  TrainResult result;
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng split_rng(derive_seed(cfg.seed, 0));
  shuffle(order, split_rng);
  size_t held = static_cast<size_t>(std::llround(cfg.heldout_fraction * n));
  held = std::min(held, n - 2);
  result.heldout.assign(order.end() - held, order.end());
  std::sort(result.heldout.begin(), result.heldout.end());
  std::vector<size_t> train_idx(order.begin(), order.end() - held);

  RmsProp<float> opt_g(model.generator.params(), cfg.rms_alpha, cfg.rms_eps);
  RmsProp<float> opt_d(model.discriminator.params(), cfg.rms_alpha, cfg.rms_eps);

  auto record = [&](EpochMetrics m) {
    const EvalMetrics ev = evaluate_generator(model, corpus, result.heldout, cfg);
    m.heldout_mse = ev.mse;
    m.heldout_t60_error = ev.t60_error;
    m.heldout_t60_used = ev.t60_used;
    result.epochs.push_back(m);
    if (on_epoch) on_epoch(m);
  };

  const double nan = std::numeric_limits<double>::quiet_NaN();
  record({0, learning_rate_at(cfg, 0), nan, nan, nan, nan, 0, 0, 0});

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const Snapshot last_good = take_snapshot(model);
    const double lr = learning_rate_at(cfg, epoch);
    Rng rng(derive_seed(cfg.seed, 1000 + static_cast<uint64_t>(epoch)));
    shuffle(train_idx, rng);

    double sum_g = 0, sum_d = 0, sum_mse = 0, sum_t60 = 0;
    int batches = 0;
    try {
      for (size_t start = 0; start < train_idx.size(); start += cfg.batch_size) {
        const size_t stop = std::min(train_idx.size(), start + cfg.batch_size);
        // Batch statistics need two items.
        if (stop - start < 2) break;
        const Batch b = gather(
            corpus, std::span<const size_t>(train_idx).subspan(start, stop - start),
            length);

        const Tensor<float> fake = model.generator.forward(b.embeddings, true);

        // Discriminator step.
        opt_d.zero_grad();
        const Tensor<float> real_scores =
            model.discriminator.forward(b.reference, b.embeddings, true);
        const std::vector<double> sr(real_scores.vec().begin(),
                                     real_scores.vec().end());
        // The loss gradient w.r.t. real scores does not depend on the fake
        // pass, so each half is back-propagated right after its forward.
        const int nb_items = static_cast<int>(sr.size());
        const std::vector<double> unused_fake(nb_items, 0.5);
        Tensor<float> g_real({nb_items});
        {
          const DiscriminatorLoss half = loss_discriminator(sr, unused_fake);
          for (int k = 0; k < nb_items; ++k) g_real[k] = static_cast<float>(half.grad_real[k]);
        }
        model.discriminator.backward(g_real);
        const Tensor<float> fake_scores =
            model.discriminator.forward(fake, b.embeddings, true);
        const std::vector<double> sf(fake_scores.vec().begin(),
                                     fake_scores.vec().end());
        const DiscriminatorLoss dl = loss_discriminator(sr, sf);
        if (!std::isfinite(dl.objective)) {
          throw DivergenceError("discriminator", "non-finite loss");
        }
        Tensor<float> g_fake({nb_items});
        for (int k = 0; k < nb_items; ++k) g_fake[k] = static_cast<float>(dl.grad_fake[k]);
        model.discriminator.backward(g_fake);
        opt_d.step(lr);

        // Generator step against the updated discriminator.
        opt_g.zero_grad();
        const GeneratorObjective<float> go = generator_objective(
            model.discriminator, fake, b.embeddings, b.reference, b.targets, cfg);
        model.generator.backward(go.d_fake);
        opt_g.step(lr);

        sum_g += go.value;
        sum_d += dl.objective;
        sum_mse += go.mse;
        sum_t60 += go.t60;
        ++batches;
      }
    } catch (const DivergenceError&) {
      restore_snapshot(model, last_good);
      throw;
    }
    const double nb = std::max(batches, 1);
    record({epoch, lr, sum_g / nb, sum_d / nb, sum_mse / nb, sum_t60 / nb, 0, 0,
            0});
  }
  return result;
}

std::string metrics_csv(std::span<const EpochMetrics> epochs) {
  std::ostringstream os;
  os.precision(9);
  os << "epoch,lr,L_G,L_D,L_MSE,L_T60,heldout_mse,heldout_t60_error\n";
  for (const auto& m : epochs) {
    os << m.epoch << ',' << m.lr << ',' << m.loss_g << ',' << m.loss_d << ','
       << m.loss_mse << ',' << m.loss_t60 << ',' << m.heldout_mse << ','
       << m.heldout_t60_error << '\n';
  }
  return os.str();
}

template class RmsProp<float>;
template class RmsProp<double>;
template GeneratorObjective<float> generator_objective<float>(
    Discriminator<float>&, const Tensor<float>&, const Tensor<float>&,
    const Tensor<float>&, std::span<const double>, const TrainConfig&, bool);
template GeneratorObjective<double> generator_objective<double>(
    Discriminator<double>&, const Tensor<double>&, const Tensor<double>&,
    const Tensor<double>&, std::span<const double>, const TrainConfig&, bool);

}  // namespace fastrir::nn
