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

#ifndef FASTRIR_NN_GAN_H_
#define FASTRIR_NN_GAN_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fastrir/env.h"
#include "fastrir/nn/layers.h"
#include "fastrir/nn/tensor.h"

namespace fastrir::nn {

// Shape plan shared by generator and discriminator.
struct GanTopology {
  int rir_length = 4096;
  int base_length = 4;
  // Generator channel pyramid; the last transposed convolution maps
  // gen_channels.back() to a single channel.
  std::vector<int> gen_channels{512, 256, 128, 64, 32};
  // Discriminator encoder widths, one strided convolution each.
  std::vector<int> disc_channels{32, 64, 128, 256, 512};
  int embed_projection = 128;
  int kernel = 41;
  int stride = 4;
  int padding = 19;
  int output_padding = 1;

  static GanTopology full_size();
  // 512-sample variant for desk-scale training runs.
  static GanTopology toy();

  void validate() const;
  bool operator==(const GanTopology&) const = default;
};

template <typename T>
class Generator {
 public:
  Generator(const GanTopology& topo, Rng& rng);

  // (N, 10) -> (N, 1, rir_length)
  Tensor<T> forward(const Tensor<T>& embeddings, bool training);
  // dL/d(output) -> dL/d(embeddings); accumulates parameter gradients.
  Tensor<T> backward(const Tensor<T>& d_out);

  std::vector<Param<T>*> params() { return net_.params(); }
  std::vector<std::pair<std::string, Tensor<T>*>> buffers() {
    return net_.buffers();
  }
  Sequential<T>& net() { return net_; }

 private:
  GanTopology topo_;
  Sequential<T> net_;
};

template <typename T>
class Discriminator {
 public:
  Discriminator(const GanTopology& topo, Rng& rng);

  // rirs (N, 1, rir_length), embeddings (N, 10) -> scores (N) in (0, 1)
  Tensor<T> forward(const Tensor<T>& rirs, const Tensor<T>& embeddings,
                    bool training);
  // dL/d(scores) -> dL/d(rirs); accumulates parameter gradients.
  Tensor<T> backward(const Tensor<T>& d_scores);

  std::vector<Param<T>*> params();
  std::vector<std::pair<std::string, Tensor<T>*>> buffers();

 private:
  GanTopology topo_;
  Sequential<T> encoder_;
  Sequential<T> projection_;
  Sequential<T> head_;
  int batch_ = 0;
};

template <typename T>
struct GanModel {
  GanTopology topology;
  NormalizationConfig normalization;
  Generator<T> generator;
  Discriminator<T> discriminator;

  GanModel(const GanTopology& topo, uint64_t seed,
           NormalizationConfig norm = {});
};

// Embeddings packed as an (N, 10) tensor.
template <typename T>
Tensor<T> embedding_tensor(std::span<const EmbeddingVec> embeddings);

// Inference-mode generator pass: one row per embedding, samples in [-1, 1].
template <typename T>
std::vector<std::vector<T>> generator_forward(
    Generator<T>& gen, std::span<const EmbeddingVec> embeddings);

}  // namespace fastrir::nn

#endif  // FASTRIR_NN_GAN_H_
