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

#include "fastrir/nn/gan.h"

#include <string>

#include "fastrir/error.h"
#include "fastrir/nn/kernels.h"
#include "fastrir/rng.h"

namespace fastrir::nn {

GanTopology GanTopology::full_size() { return GanTopology{}; }

GanTopology GanTopology::toy() {
  GanTopology t;
  t.rir_length = 512;
  t.base_length = 2;
  t.gen_channels = {128, 64, 32, 16};
  t.disc_channels = {16, 32, 64, 128};
  t.embed_projection = 32;
  return t;
}

void GanTopology::validate() const {
  if (gen_channels.empty() || disc_channels.empty()) {
    throw ConfigError("topology needs at least one up/down-sampling stage");
  }
  for (int c : gen_channels) {
    if (c < 1) throw ConfigError("generator channel count must be >= 1");
  }
  for (int c : disc_channels) {
    if (c < 1) throw ConfigError("discriminator channel count must be >= 1");
  }
  if (base_length < 1 || embed_projection < 1 || kernel < 1 || stride < 1) {
    throw ConfigError("topology sizes must be >= 1");
  }
  int len = base_length;
  for (size_t i = 0; i < gen_channels.size(); ++i) {
    len = kernels::conv_transpose_out_length(len, kernel, stride, padding,
                                             output_padding);
  }
  if (len != rir_length) {
    throw ConfigError("generator produces length " + std::to_string(len) +
                      ", expected " + std::to_string(rir_length));
  }
  len = rir_length;
  for (size_t i = 0; i < disc_channels.size(); ++i) {
    len = kernels::conv_out_length(len, kernel, stride, padding);
    if (len < 1) throw ConfigError("discriminator encoder collapses to length 0");
  }
  if (len != base_length) {
    throw ConfigError("discriminator encoder ends at length " +
                      std::to_string(len) + ", expected " +
                      std::to_string(base_length));
  }
}

template <typename T>
Generator<T>::Generator(const GanTopology& topo, Rng& rng) : topo_(topo) {
  topo_.validate();
  const int c0 = topo_.gen_channels.front();
  net_.set_prefix("gen.");
  net_.template emplace<Linear<T>>(kEmbeddingSize, c0 * topo_.base_length, rng);
  net_.template emplace<BatchNorm1d<T>>(c0 * topo_.base_length, rng);
  net_.template emplace<ReLU<T>>();
  net_.template emplace<Reshape<T>>(std::vector<int>{c0, topo_.base_length});
  const size_t n = topo_.gen_channels.size();
  for (size_t i = 0; i < n; ++i) {
    const bool last = i + 1 == n;
    ConvConfig c;
    c.in_channels = topo_.gen_channels[i];
    c.out_channels = last ? 1 : topo_.gen_channels[i + 1];
    c.kernel = topo_.kernel;
    c.stride = topo_.stride;
    c.padding = topo_.padding;
    c.output_padding = topo_.output_padding;
    net_.template emplace<ConvTranspose1d<T>>(c, rng);
    if (last) {
      net_.template emplace<Tanh<T>>();
    } else {
      net_.template emplace<BatchNorm1d<T>>(c.out_channels, rng);
      net_.template emplace<ReLU<T>>();
    }
  }
}

template <typename T>
Tensor<T> Generator<T>::forward(const Tensor<T>& embeddings, bool training) {
  if (embeddings.rank() != 2 || embeddings.dim(1) != kEmbeddingSize) {
    throw ConfigError("generator expects (batch, 10) embeddings, got " +
                      shape_string(embeddings.shape()));
  }
  return net_.forward(embeddings, training);
}

template <typename T>
Tensor<T> Generator<T>::backward(const Tensor<T>& d_out) {
  return net_.backward(d_out);
}

template <typename T>
Discriminator<T>::Discriminator(const GanTopology& topo, Rng& rng)
    : topo_(topo) {
  topo_.validate();
  encoder_.set_prefix("disc.encoder.");
  projection_.set_prefix("disc.projection.");
  head_.set_prefix("disc.head.");
  int prev = 1;
  for (size_t i = 0; i < topo_.disc_channels.size(); ++i) {
    ConvConfig c;
    c.in_channels = prev;
    c.out_channels = topo_.disc_channels[i];
    c.kernel = topo_.kernel;
    c.stride = topo_.stride;
    c.padding = topo_.padding;
    encoder_.template emplace<Conv1d<T>>(c, rng);
    if (i > 0) encoder_.template emplace<BatchNorm1d<T>>(c.out_channels, rng);
    encoder_.template emplace<LeakyReLU<T>>(0.2);
    prev = c.out_channels;
  }
  projection_.template emplace<Linear<T>>(kEmbeddingSize,
                                          topo_.embed_projection, rng);
  projection_.template emplace<LeakyReLU<T>>(0.2);

  const int joint = prev + topo_.embed_projection;
  head_.template emplace<Conv1d<T>>(ConvConfig{joint, prev, 1, 1, 0, 0}, rng);
  head_.template emplace<BatchNorm1d<T>>(prev, rng);
  head_.template emplace<LeakyReLU<T>>(0.2);
  head_.template emplace<Conv1d<T>>(
      ConvConfig{prev, 1, topo_.base_length, 1, 0, 0}, rng);
  head_.template emplace<Sigmoid<T>>();
}

template <typename T>
Tensor<T> Discriminator<T>::forward(const Tensor<T>& rirs,
                                    const Tensor<T>& embeddings,
                                    bool training) {
  if (rirs.rank() != 3 || rirs.dim(1) != 1 || rirs.dim(2) != topo_.rir_length) {
    throw ConfigError("discriminator expects (batch, 1, " +
                      std::to_string(topo_.rir_length) + ") RIRs, got " +
                      shape_string(rirs.shape()));
  }
  if (embeddings.rank() != 2 || embeddings.dim(0) != rirs.dim(0) ||
      embeddings.dim(1) != kEmbeddingSize) {
    throw ConfigError("discriminator embeddings " +
                      shape_string(embeddings.shape()) +
                      " do not match RIR batch " + shape_string(rirs.shape()));
  }
  batch_ = rirs.dim(0);
  const Tensor<T> h = encoder_.forward(rirs, training);
  const Tensor<T> p = projection_.forward(embeddings, training);
  const int d = h.dim(1), len = h.dim(2), e = p.dim(1);
  Tensor<T> joint({batch_, d + e, len});
  for (int n = 0; n < batch_; ++n) {
    const T* hs = h.data() + static_cast<long>(n) * d * len;
    T* js = joint.data() + static_cast<long>(n) * (d + e) * len;
    std::copy(hs, hs + static_cast<long>(d) * len, js);
    for (int c = 0; c < e; ++c) {
      std::fill_n(js + static_cast<long>(d + c) * len, len,
                  p[static_cast<long>(n) * e + c]);
    }
  }
  return head_.forward(joint, training).reshaped({batch_});
}

template <typename T>
Tensor<T> Discriminator<T>::backward(const Tensor<T>& d_scores) {
  const Tensor<T> d_joint = head_.backward(d_scores.reshaped({batch_, 1, 1}));
  const int d = topo_.disc_channels.back(), e = topo_.embed_projection;
  const int len = d_joint.dim(2);
  Tensor<T> dh({batch_, d, len});
  Tensor<T> dp({batch_, e});
  for (int n = 0; n < batch_; ++n) {
    const T* js = d_joint.data() + static_cast<long>(n) * (d + e) * len;
    std::copy(js, js + static_cast<long>(d) * len,
              dh.data() + static_cast<long>(n) * d * len);
    for (int c = 0; c < e; ++c) {
      T acc = 0;
      for (int t = 0; t < len; ++t) acc += js[static_cast<long>(d + c) * len + t];
      dp[static_cast<long>(n) * e + c] = acc;
    }
  }
  projection_.backward(dp);
  return encoder_.backward(dh);
}

template <typename T>
std::vector<Param<T>*> Discriminator<T>::params() {
  std::vector<Param<T>*> out = encoder_.params();
  for (auto* p : projection_.params()) out.push_back(p);
  for (auto* p : head_.params()) out.push_back(p);
  return out;
}

template <typename T>
std::vector<std::pair<std::string, Tensor<T>*>> Discriminator<T>::buffers() {
  auto out = encoder_.buffers();
  for (auto& b : projection_.buffers()) out.push_back(b);
  for (auto& b : head_.buffers()) out.push_back(b);
  return out;
}

template <typename T>
GanModel<T>::GanModel(const GanTopology& topo, uint64_t seed,
                      NormalizationConfig norm)
    : topology(topo),
      normalization(norm),
      generator([&] {
        Rng rng(derive_seed(seed, 0));
        return Generator<T>(topo, rng);
      }()),
      discriminator([&] {
        Rng rng(derive_seed(seed, 1));
        return Discriminator<T>(topo, rng);
      }()) {
  validate(normalization);
}

template <typename T>
Tensor<T> embedding_tensor(std::span<const EmbeddingVec> embeddings) {
  Tensor<T> t({static_cast<int>(embeddings.size()), kEmbeddingSize});
  for (size_t n = 0; n < embeddings.size(); ++n) {
    for (int i = 0; i < kEmbeddingSize; ++i) {
      t[n * kEmbeddingSize + i] = static_cast<T>(embeddings[n][i]);
    }
  }
  return t;
}

template <typename T>
std::vector<std::vector<T>> generator_forward(
    Generator<T>& gen, std::span<const EmbeddingVec> embeddings) {
  if (embeddings.empty()) return {};
  const Tensor<T> out = gen.forward(embedding_tensor<T>(embeddings), false);
  const size_t len = out.dim(2);
  std::vector<std::vector<T>> rows(embeddings.size());
  for (size_t n = 0; n < rows.size(); ++n) {
    rows[n].assign(out.data() + n * len, out.data() + (n + 1) * len);
  }
  return rows;
}

#define FASTRIR_INSTANTIATE_GAN(T)                                        \
  template class Generator<T>;                                            \
  template class Discriminator<T>;                                        \
  template struct GanModel<T>;                                            \
  template Tensor<T> embedding_tensor<T>(std::span<const EmbeddingVec>);  \
  template std::vector<std::vector<T>> generator_forward<T>(              \
      Generator<T>&, std::span<const EmbeddingVec>);

FASTRIR_INSTANTIATE_GAN(float)
FASTRIR_INSTANTIATE_GAN(double)

}  // namespace fastrir::nn
