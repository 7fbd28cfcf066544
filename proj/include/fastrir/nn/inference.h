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

#ifndef FASTRIR_NN_INFERENCE_H_
#define FASTRIR_NN_INFERENCE_H_

#include <span>
#include <vector>

#include "fastrir/env.h"
#include "fastrir/nn/gan.h"
#include "fastrir/rir.h"

namespace fastrir::nn {

// Validates and embeds each environment with the model's normalization and
// runs the generator in inference mode, `batch_size` items per pass.
std::vector<Rir> generate_neural(GanModel<float>& model,
                                 std::span<const AcousticEnv> envs,
                                 int sample_rate, int batch_size = 64);

}  // namespace fastrir::nn

#endif  // FASTRIR_NN_INFERENCE_H_
