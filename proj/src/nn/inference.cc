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

#include "fastrir/nn/inference.h"

#include <algorithm>

#include "fastrir/error.h"

namespace fastrir::nn {

std::vector<Rir> generate_neural(GanModel<float>& model,
                                 std::span<const AcousticEnv> envs,
                                 int sample_rate, int batch_size) {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  std::vector<EmbeddingVec> embeddings;
  embeddings.reserve(envs.size());
  for (const AcousticEnv& env : envs) {
    embeddings.push_back(build_embedding(env, model.normalization));
  }
  std::vector<Rir> out;
  out.reserve(envs.size());
  for (size_t start = 0; start < envs.size(); start += batch_size) {
    const size_t n = std::min<size_t>(batch_size, envs.size() - start);
    const auto rows = generator_forward(
        model.generator, std::span<const EmbeddingVec>(embeddings).subspan(start, n));
    for (const auto& row : rows) {
      Rir rir;
      rir.samples.assign(row.begin(), row.end());
      rir.sample_rate = sample_rate;
      rir.provenance = Provenance::kNeural;
      out.push_back(std::move(rir));
    }
  }
  return out;
}

}  // namespace fastrir::nn
