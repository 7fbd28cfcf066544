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

// Times the serial reference kernels against the parallel ones on the layer
// shapes of the default generator, then the end-to-end generators.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fastrir/nn/gan.h"
#include "fastrir/nn/inference.h"
#include "fastrir/nn/kernels.h"
#include "fastrir/parallel.h"
#include "fastrir/rir_core.h"
#include "fastrir/rng.h"

namespace {

namespace k = fastrir::nn::kernels;

double median_seconds(int reps, const std::function<void()>& fn) {
  fn();
  std::vector<double> t;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start).count());
  }
  std::nth_element(t.begin(), t.begin() + t.size() / 2, t.end());
  return t[t.size() / 2];
}

std::vector<float> random_vec(size_t n, uint64_t seed) {
  fastrir::Rng rng(seed);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.normal());
  return v;
}

void report(const std::string& name, double serial, double parallel) {
  std::printf("%-34s %10.3f ms %10.3f ms %7.2fx\n", name.c_str(), serial * 1e3,
              parallel * 1e3, serial / parallel);
}

void bench_conv_transpose(int batch, int cin, int cout, int lin, int reps) {
  k::ConvShape s{batch, cin, cout, 41, 4, 19, 1, lin, 0};
  s.out_length = k::conv_transpose_out_length(lin, 41, 4, 19, 1);
  const auto x = random_vec(size_t(batch) * cin * lin, 1);
  const auto w = random_vec(size_t(cin) * cout * 41, 2);
  const auto b = random_vec(cout, 3);
  std::vector<float> y(size_t(batch) * cout * s.out_length);
  const double ts = median_seconds(reps, [&] {
    k::serial::conv_transpose1d_forward(s, x.data(), w.data(), b.data(), y.data());
  });
  const double tp = median_seconds(reps, [&] {
    k::conv_transpose1d_forward(s, x.data(), w.data(), b.data(), y.data());
  });
  char name[96];
  std::snprintf(name, sizeof(name), "convT fwd b%d %d->%d L%d", batch, cin, cout, lin);
  report(name, ts, tp);
}

void bench_conv(int batch, int cin, int cout, int lin, int reps) {
  k::ConvShape s{batch, cin, cout, 41, 4, 19, 0, lin, 0};
  s.out_length = k::conv_out_length(lin, 41, 4, 19);
  const auto x = random_vec(size_t(batch) * cin * lin, 4);
  const auto w = random_vec(size_t(cout) * cin * 41, 5);
  const auto b = random_vec(cout, 6);
  std::vector<float> y(size_t(batch) * cout * s.out_length);
  std::vector<float> dx(x.size()), dw(w.size()), db(b.size());
  const double ts = median_seconds(reps, [&] {
    k::serial::conv1d_forward(s, x.data(), w.data(), b.data(), y.data());
  });
  const double tp = median_seconds(reps, [&] {
    k::conv1d_forward(s, x.data(), w.data(), b.data(), y.data());
  });
  char name[96];
  std::snprintf(name, sizeof(name), "conv fwd b%d %d->%d L%d", batch, cin, cout, lin);
  report(name, ts, tp);
  const double bs = median_seconds(reps, [&] {
    k::serial::conv1d_backward(s, x.data(), w.data(), y.data(), dx.data(),
                               dw.data(), db.data());
  });
  const double bp = median_seconds(reps, [&] {
    k::conv1d_backward(s, x.data(), w.data(), y.data(), dx.data(), dw.data(),
                       db.data());
  });
  std::snprintf(name, sizeof(name), "conv bwd b%d %d->%d L%d", batch, cin, cout, lin);
  report(name, bs, bp);
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
  std::printf("threads: %d\n", fastrir::max_threads());
  std::printf("%-34s %13s %13s %8s\n", "kernel", "serial", "parallel", "speedup");
  for (int batch : {1, 16}) {
    bench_conv_transpose(batch, 512, 256, 4, reps);
    bench_conv_transpose(batch, 128, 64, 256, reps);
    bench_conv_transpose(batch, 32, 1, 1024, reps);
  }
  bench_conv(16, 1, 32, 4096, reps);
  bench_conv(16, 64, 128, 256, reps);

  using fastrir::nn::GanModel;
  using fastrir::nn::GanTopology;
  GanModel<float> model(GanTopology::full_size(), 0);
  std::vector<fastrir::AcousticEnv> envs;
  for (int i = 0; i < 64; ++i) {
    envs.push_back(fastrir::sample_environment(fastrir::derive_seed(0, i),
                                               {10.0, 7.0, 3.0}, 0.2, 0.7));
  }
  fastrir::SynthConfig cfg;
  std::printf("\n%-34s %13s\n", "generator (64 RIRs)", "per RIR");
  const double tr = median_seconds(reps, [&] {
    fastrir::generate_reference_batch(envs, cfg);
  });
  std::printf("%-34s %10.3f ms\n", "reference", tr / 64 * 1e3);
  for (int batch : {1, 64}) {
    const double tn = median_seconds(reps, [&] {
      fastrir::nn::generate_neural(model, envs, cfg.sample_rate, batch);
    });
    std::printf("neural batch %-21d %10.3f ms\n", batch, tn / 64 * 1e3);
  }
  return 0;
}
