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

#ifndef FASTRIR_NN_CHECKPOINT_H_
#define FASTRIR_NN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <memory>

#include "fastrir/nn/gan.h"

namespace fastrir::nn {

// File layout: "FASTRIR\0", u32 version, u32 header length, JSON header
// (topology, normalization, sample_rate), u32 record count, then per record
// u32 name length, name, u32 rank, rank x u32 dims, float32 data. All
// integers and floats little-endian.
inline constexpr uint32_t kCheckpointVersion = 1;

struct LoadedModel {
  std::unique_ptr<GanModel<float>> model;
  int sample_rate = 16000;
};

void save_checkpoint(const std::filesystem::path& path, GanModel<float>& model,
                     int sample_rate);
LoadedModel load_checkpoint(const std::filesystem::path& path);

nlohmann::json topology_to_json(const GanTopology& t);
GanTopology topology_from_json(const nlohmann::json& j);

}  // namespace fastrir::nn

#endif  // FASTRIR_NN_CHECKPOINT_H_
