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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "fastrir/error.h"
#include "fastrir/nn/checkpoint.h"
#include "fastrir/nn/gan.h"
#include "fastrir/nn/gradcheck.h"
#include "fastrir/nn/inference.h"
#include "fastrir/nn/train.h"
#include "fixtures.h"
#include "oracles.h"

namespace fastrir::nn {
namespace {

namespace fs = std::filesystem;
using fastrir::testing::tiny_topology;
using fastrir::testing::toy_corpus;
using fastrir::testing::decaying_batch;
using fastrir::testing::random_embeddings;

std::vector<std::vector<int>> weight_shapes(std::vector<Param<float>*> params,
                                            const std::string& prefix) {
  std::vector<std::vector<int>> out;
  for (auto* p : params) {
    if (p->name.rfind(prefix, 0) == 0 && p->name.ends_with(".weight") &&
        p->value.rank() == 3) {
      out.push_back(p->value.shape());
    }
  }
  return out;
}

TEST(Topology, DefaultShapes) {
  GanModel<float> m(GanTopology::full_size(), 0);
  const auto gen = weight_shapes(m.generator.params(), "gen.");
  const std::vector<std::vector<int>> want_gen{
      {512, 256, 41}, {256, 128, 41}, {128, 64, 41}, {64, 32, 41}, {32, 1, 41}};
  EXPECT_EQ(gen, want_gen);
  bool dense = false;
  for (auto* p : m.generator.params()) {
    if (p->value.shape() == std::vector<int>{2048, 10}) dense = true;
  }
  EXPECT_TRUE(dense);
  const auto enc = weight_shapes(m.discriminator.params(), "disc.encoder.");
  const std::vector<std::vector<int>> want_enc{
      {32, 1, 41}, {64, 32, 41}, {128, 64, 41}, {256, 128, 41}, {512, 256, 41}};
  EXPECT_EQ(enc, want_enc);
}

TEST(Topology, LengthChains) {
  const GanTopology t = GanTopology::full_size();
  int len = t.base_length;
  std::vector<int> chain{len};
  for (size_t i = 0; i < t.gen_channels.size(); ++i) {
    len = kernels::conv_transpose_out_length(len, 41, 4, 19, 1);
    chain.push_back(len);
  }
  EXPECT_EQ(chain, (std::vector<int>{4, 16, 64, 256, 1024, 4096}));
  std::vector<int> down{4096};
  for (size_t i = 0; i < t.disc_channels.size(); ++i) {
    down.push_back(kernels::conv_out_length(down.back(), 41, 4, 19));
  }
  EXPECT_EQ(down, (std::vector<int>{4096, 1024, 256, 64, 16, 4}));
}

TEST(Topology, InconsistentRejected) {
  GanTopology t = GanTopology::full_size();
  t.rir_length = 4000;
  EXPECT_THROW(t.validate(), ConfigError);
  EXPECT_NO_THROW(GanTopology::toy().validate());
}

TEST(Generator, OutputShapeAndTanhBound) {
  GanModel<float> m(GanTopology::full_size(), 1);
  const auto emb = random_embeddings<float>(3, 2);
  for (bool training : {true, false}) {
    const Tensor<float> y = m.generator.forward(emb, training);
    EXPECT_EQ(y.shape(), (std::vector<int>{3, 1, 4096}));
    for (float v : y.vec()) {
      ASSERT_LE(std::abs(v), 1.0f);
      ASSERT_TRUE(std::isfinite(v));
    }
  }
}

TEST(Generator, WrongEmbeddingWidth) {
  GanModel<float> m(GanTopology::toy(), 1);
  EXPECT_THROW(m.generator.forward(Tensor<float>({2, 9}), false), ConfigError);
}

TEST(Generator, InferenceIsDeterministicPerItem) {
  GanModel<float> m(GanTopology::toy(), 3);
  Tensor<float> emb = random_embeddings<float>(1, 4);
  Tensor<float> batch({4, kEmbeddingSize});
  for (int n = 0; n < 4; ++n) {
    for (int i = 0; i < kEmbeddingSize; ++i) batch[n * kEmbeddingSize + i] = emb[i];
  }
  const Tensor<float> y = m.generator.forward(batch, false);
  const size_t len = y.size() / 4;
  for (int n = 1; n < 4; ++n) {
    for (size_t i = 0; i < len; ++i) ASSERT_EQ(y[n * len + i], y[i]);
  }
  const Tensor<float> again = m.generator.forward(batch, false);
  EXPECT_EQ(again.vec(), y.vec());
}

TEST(Discriminator, ScoresInsideUnitInterval) {
  GanModel<float> m(GanTopology::full_size(), 5);
  Rng rng(6);
  Tensor<float> rirs({8, 1, 4096});
  for (auto& v : rirs.vec()) v = static_cast<float>(rng.uniform(-1, 1));
  const auto emb = random_embeddings<float>(8, 7);
  for (bool training : {true, false}) {
    const Tensor<float> s = m.discriminator.forward(rirs, emb, training);
    ASSERT_EQ(s.shape(), std::vector<int>{8});
    for (float v : s.vec()) {
      EXPECT_GT(v, 0.0f);
      EXPECT_LT(v, 1.0f);
    }
  }
}

TEST(Discriminator, UntrainedScoresAverageOneHalf) {
  // The logit offset of a single initialization is random; its mean over
  // initializations is zero.
  Rng rng(8);
  Tensor<float> rirs({8, 1, 512});
  for (auto& v : rirs.vec()) v = static_cast<float>(rng.uniform(-1, 1));
  const auto emb = random_embeddings<float>(8, 9);
  double mean = 0.0;
  const int models = 40;
  for (int seed = 0; seed < models; ++seed) {
    GanModel<float> m(GanTopology::toy(), seed);
    const Tensor<float> scores = m.discriminator.forward(rirs, emb, true);
    for (float v : scores.vec()) mean += v / (8.0 * models);
  }
  EXPECT_NEAR(mean, 0.5, 0.05);
}

TEST(Discriminator, WrongLengthRejected) {
  GanModel<float> m(GanTopology::toy(), 5);
  EXPECT_THROW(m.discriminator.forward(Tensor<float>({2, 1, 500}),
                                       random_embeddings<float>(2, 1), false),
               ConfigError);
}

// Decaying 32-sample items so the T60 term participates.
TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.sample_rate = 16000;
  return cfg;
}

TEST(FullLoss, GradientWrtGeneratedBatch) {
  GanModel<double> m(tiny_topology(), 11);
  const int n = 4;
  Tensor<double> fake = decaying_batch(n, 12);
  const Tensor<double> ref = decaying_batch(n, 13);
  const Tensor<double> emb = random_embeddings<double>(n, 14);
  const TrainConfig cfg = tiny_config();
  std::vector<double> targets(n, 0.0015);
  const GeneratorObjective<double> go =
      generator_objective(m.discriminator, fake, emb, ref, targets, cfg);
  ASSERT_GT(go.t60_used, 0u);
  ASSERT_NE(go.t60, 0.0);
  GradCheckResult r;
  Rng rng(15);
  check_tensor("fake", fake, go.d_fake, [&] {
    return generator_objective(m.discriminator, fake, emb, ref, targets, cfg).value;
  }, 1 << 20, rng, r);
  EXPECT_LE(r.max_rel_error, 1e-4) << r.worst;
  EXPECT_EQ(r.checked, n * 32);
}

TEST(FullLoss, GradientWrtGeneratorParameters) {
  GanModel<double> m(tiny_topology(), 21);
  const int n = 4;
  const Tensor<double> ref = decaying_batch(n, 22);
  const Tensor<double> emb = random_embeddings<double>(n, 23);
  const TrainConfig cfg = tiny_config();
  const std::vector<double> targets(n, 0.0015);
  auto loss = [&] {
    const Tensor<double> fake = m.generator.forward(emb, true);
    return generator_objective(m.discriminator, fake, emb, ref, targets, cfg).value;
  };
  for (auto* p : m.generator.params()) p->grad.fill(0.0);
  const Tensor<double> fake = m.generator.forward(emb, true);
  const auto go = generator_objective(m.discriminator, fake, emb, ref, targets, cfg);
  m.generator.backward(go.d_fake);
  GradCheckResult r;
  Rng rng(24);
  for (auto* p : m.generator.params()) {
    const Tensor<double> analytic = p->grad;
    check_tensor(p->name, p->value, analytic, loss, 64, rng, r);
  }
  EXPECT_LE(r.max_rel_error, 1e-4) << r.worst;
  EXPECT_GT(r.checked, 50);
}

TEST(FullLoss, DiscriminatorObjectiveGradient) {
  GanModel<double> m(tiny_topology(), 31);
  const int n = 4;
  const Tensor<double> real = decaying_batch(n, 32);
  const Tensor<double> fake = decaying_batch(n, 33);
  const Tensor<double> emb = random_embeddings<double>(n, 34);
  auto scores = [](const Tensor<double>& t) {
    return std::vector<double>(t.vec().begin(), t.vec().end());
  };
  auto loss = [&] {
    const auto sr = scores(m.discriminator.forward(real, emb, true));
    const auto sf = scores(m.discriminator.forward(fake, emb, true));
    return -loss_discriminator(sr, sf).objective;
  };
  for (auto* p : m.discriminator.params()) p->grad.fill(0.0);
  const auto sr = scores(m.discriminator.forward(real, emb, true));
  const auto sf_probe = std::vector<double>(n, 0.5);
  const auto gr = loss_discriminator(sr, sf_probe).grad_real;
  Tensor<double> d({n});
  for (int i = 0; i < n; ++i) d[i] = gr[i];
  m.discriminator.backward(d);
  const auto sf = scores(m.discriminator.forward(fake, emb, true));
  const auto gf = loss_discriminator(sr, sf).grad_fake;
  for (int i = 0; i < n; ++i) d[i] = gf[i];
  m.discriminator.backward(d);
  GradCheckResult r;
  Rng rng(35);
  for (auto* p : m.discriminator.params()) {
    const Tensor<double> analytic = p->grad;
    check_tensor(p->name, p->value, analytic, loss, 64, rng, r);
  }
  EXPECT_LE(r.max_rel_error, 1e-4) << r.worst;
}

std::vector<std::vector<float>> values(std::vector<Param<float>*> ps) {
  std::vector<std::vector<float>> out;
  for (auto* p : ps) out.push_back(p->value.vec());
  return out;
}

TEST(TrainingStep, EachStepMovesOnlyItsNetwork) {
  GanModel<float> m(tiny_topology(), 41);
  const int n = 4;
  Tensor<float> real({n, 1, 32});
  const Tensor<double> d = decaying_batch(n, 42);
  for (size_t i = 0; i < d.size(); ++i) real[i] = static_cast<float>(d[i]);
  const Tensor<float> emb = random_embeddings<float>(n, 43);
  const TrainConfig cfg = tiny_config();
  RmsProp<float> opt_d(m.discriminator.params(), cfg.rms_alpha, cfg.rms_eps);
  RmsProp<float> opt_g(m.generator.params(), cfg.rms_alpha, cfg.rms_eps);

  const auto g0 = values(m.generator.params());
  const auto d0 = values(m.discriminator.params());
  const Tensor<float> fake = m.generator.forward(emb, true);
  opt_d.zero_grad();
  const Tensor<float> sr = m.discriminator.forward(real, emb, true);
  const Tensor<float> sf = m.discriminator.forward(fake, emb, true);
  const std::vector<double> vr(sr.vec().begin(), sr.vec().end());
  const std::vector<double> vf(sf.vec().begin(), sf.vec().end());
  const DiscriminatorLoss dl = loss_discriminator(vr, vf);
  Tensor<float> ds({n});
  for (int i = 0; i < n; ++i) ds[i] = static_cast<float>(dl.grad_fake[i]);
  m.discriminator.backward(ds);
  opt_d.step(1e-3);
  EXPECT_EQ(values(m.generator.params()), g0);
  const auto d1 = values(m.discriminator.params());
  EXPECT_NE(d1, d0);

  opt_g.zero_grad();
  const std::vector<double> targets(n, 0.0015);
  const auto go = generator_objective(m.discriminator, fake, emb, real, targets, cfg);
  m.generator.backward(go.d_fake);
  opt_g.step(1e-3);
  EXPECT_EQ(values(m.discriminator.params()), d1);
  EXPECT_NE(values(m.generator.params()), g0);
}

TEST(Train, SameSeedSameMetrics) {
  const auto corpus = toy_corpus(48);
  TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.epochs = 1;
  cfg.sample_rate = 8000;
  cfg.seed = 4;
  auto run = [&] {
    GanModel<float> m(GanTopology::toy(), 4, fastrir::testing::kToyNormalization);
    return train(m, corpus.examples, cfg).epochs;
  };
  const auto a = run();
  const auto b = run();
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].epoch, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].heldout_mse, b[i].heldout_mse);
    if (i > 0) {
      EXPECT_EQ(a[i].loss_g, b[i].loss_g);
      EXPECT_EQ(a[i].loss_d, b[i].loss_d);
    }
  }
}

TEST(Train, HeldOutSplitIsDisjointAndSeeded) {
  const auto corpus = toy_corpus(40);
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.epochs = 0;
  cfg.sample_rate = 8000;
  GanModel<float> m(GanTopology::toy(), 0, fastrir::testing::kToyNormalization);
  const TrainResult r = train(m, corpus.examples, cfg);
  EXPECT_EQ(r.heldout.size(), 4u);
  const TrainResult again = train(m, corpus.examples, cfg);
  EXPECT_EQ(r.heldout, again.heldout);
}

TEST(Train, ToyRunReducesTrainingMse) {
  const auto corpus = toy_corpus(512);
  TrainConfig cfg;
  cfg.batch_size = 32;
  cfg.epochs = 5;
  cfg.sample_rate = 8000;
  GanModel<float> m(GanTopology::toy(), 0, fastrir::testing::kToyNormalization);
  const TrainResult r = train(m, corpus.examples, cfg);
  ASSERT_EQ(r.epochs.size(), 6u);
  EXPECT_LT(r.epochs[5].loss_mse, r.epochs[1].loss_mse);
  for (size_t e = 1; e < r.epochs.size(); ++e) {
    EXPECT_DOUBLE_EQ(r.epochs[e].lr, 8e-5);
  }
}

TEST(Train, DivergenceRestoresEpochStart) {
  auto corpus = toy_corpus(32);
  for (auto& ex : corpus.examples) ex.rir[7] = std::numeric_limits<float>::quiet_NaN();
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.epochs = 2;
  cfg.sample_rate = 8000;
  GanModel<float> m(GanTopology::toy(), 0, fastrir::testing::kToyNormalization);
  const auto g0 = values(m.generator.params());
  const auto d0 = values(m.discriminator.params());
  EXPECT_THROW(train(m, corpus.examples, cfg), DivergenceError);
  EXPECT_EQ(values(m.generator.params()), g0);
  EXPECT_EQ(values(m.discriminator.params()), d0);
}

TEST(MetricsCsv, Header) {
  const std::vector<EpochMetrics> rows(1);
  const std::string csv = metrics_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "epoch,lr,L_G,L_D,L_MSE,L_T60,heldout_mse,heldout_t60_error");
}

class CheckpointTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fastrir_ckpt_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(CheckpointTest, RoundTripIsExact) {
  GanModel<float> m(GanTopology::toy(), 8, fastrir::testing::kToyNormalization);
  // Move BN running statistics away from their initial values.
  m.generator.forward(random_embeddings<float>(6, 1), true);
  const fs::path path = dir_ / "m.bin";
  save_checkpoint(path, m, 8000);
  LoadedModel loaded = load_checkpoint(path);
  EXPECT_EQ(loaded.sample_rate, 8000);
  EXPECT_EQ(loaded.model->topology, m.topology);
  EXPECT_EQ(loaded.model->normalization.d_max, 3.0);
  EXPECT_EQ(values(loaded.model->generator.params()), values(m.generator.params()));
  EXPECT_EQ(values(loaded.model->discriminator.params()),
            values(m.discriminator.params()));
  auto bufs = m.generator.buffers();
  auto lbufs = loaded.model->generator.buffers();
  ASSERT_EQ(bufs.size(), lbufs.size());
  for (size_t i = 0; i < bufs.size(); ++i) {
    EXPECT_EQ(bufs[i].first, lbufs[i].first);
    EXPECT_EQ(bufs[i].second->vec(), lbufs[i].second->vec());
  }
  const auto emb = random_embeddings<float>(3, 2);
  EXPECT_EQ(m.generator.forward(emb, false).vec(),
            loaded.model->generator.forward(emb, false).vec());
}

TEST_F(CheckpointTest, CorruptFilesRejected) {
  GanModel<float> m(GanTopology::toy(), 8);
  const fs::path path = dir_ / "m.bin";
  save_checkpoint(path, m, 16000);
  const auto size = fs::file_size(path);
  fs::resize_file(path, size / 2);
  EXPECT_THROW(load_checkpoint(path), IoError);
  {
    std::ofstream f(dir_ / "bad.bin", std::ios::binary);
    f << "NOTAMODEL";
  }
  EXPECT_THROW(load_checkpoint(dir_ / "bad.bin"), IoError);
  EXPECT_THROW(load_checkpoint(dir_ / "missing.bin"), IoError);
}

TEST(Inference, BatchSizeDoesNotChangeOutput) {
  GanModel<float> m(GanTopology::toy(), 9, fastrir::testing::kToyNormalization);
  const auto corpus = toy_corpus(5);
  const auto a = generate_neural(m, corpus.envs, 8000, 1);
  const auto b = generate_neural(m, corpus.envs, 8000, 4);
  ASSERT_EQ(a.size(), 5u);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].length(), 512u);
    EXPECT_EQ(a[i].provenance, Provenance::kNeural);
    for (size_t k = 0; k < a[i].length(); ++k) {
      ASSERT_NEAR(a[i].samples[k], b[i].samples[k], 1e-6);
    }
  }
}

TEST(Inference, InvalidEnvNamesField) {
  GanModel<float> m(GanTopology::toy(), 9, fastrir::testing::kToyNormalization);
  std::vector<AcousticEnv> envs{{{2.5, 2, 2}, {3, 1, 1}, {1, 1, 1}, 0.1}};
  try {
    generate_neural(m, envs, 8000);
    FAIL();
  } catch (const RangeError& e) {
    EXPECT_EQ(e.field(), "source.x");
  }
}

}  // namespace
}  // namespace fastrir::nn
