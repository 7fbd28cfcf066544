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

#ifndef FASTRIR_TESTS_FIXTURES_H_
#define FASTRIR_TESTS_FIXTURES_H_

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "fastrir/env.h"
#include "fastrir/nn/gan.h"
#include "fastrir/nn/train.h"
#include "fastrir/rir_core.h"
#include "fastrir/rng.h"

namespace fastrir::testing {

// Small rooms and short decays so 512 samples at 8 kHz hold the response.
inline constexpr NormalizationConfig kToyNormalization{3.0, 0.2};

inline SynthConfig toy_synth_config() {
  SynthConfig cfg;
  cfg.sample_rate = 8000;
  cfg.length = 512;
  cfg.seed = 1;
  return cfg;
}

struct ToyCorpus {
  std::vector<AcousticEnv> envs;
  std::vector<Rir> rirs;
  std::vector<nn::TrainingExample> examples;
};

inline ToyCorpus toy_corpus(int n, uint64_t seed = 9) {
  ToyCorpus c;
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    const Vec3 room{rng.uniform(2.0, 3.0), rng.uniform(1.8, 2.5),
                    rng.uniform(1.8, 2.4)};
    c.envs.push_back(sample_environment(derive_seed(seed, i), room, 0.08, 0.2));
  }
  c.rirs = generate_reference_batch(c.envs, toy_synth_config());
  for (int i = 0; i < n; ++i) {
    nn::TrainingExample ex;
    ex.embedding = build_embedding(c.envs[i], kToyNormalization);
    ex.rir.assign(c.rirs[i].samples.begin(), c.rirs[i].samples.end());
    ex.t60 = c.envs[i].t60;
    c.examples.push_back(std::move(ex));
  }
  return c;
}

// Two-stage network on 32-sample signals, small enough for double-precision
// finite differences.
inline nn::GanTopology tiny_topology() {
  nn::GanTopology t;
  t.rir_length = 32;
  t.base_length = 2;
  t.gen_channels = {4, 3};
  t.disc_channels = {3, 4};
  t.embed_projection = 4;
  return t;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("fastrir_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const {
    return path_ / leaf;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace fastrir::testing

#endif  // FASTRIR_TESTS_FIXTURES_H_
