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

#ifndef FASTRIR_IO_H_
#define FASTRIR_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fastrir/env.h"
#include "fastrir/rir.h"

namespace fastrir {

struct WavData {
  std::vector<double> samples;
  int sample_rate = 0;
};

// Mono 16-bit PCM or 32-bit float. Anything else is an IoError.
WavData read_wav(const std::filesystem::path& path);
// Mono 32-bit float.
void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               int sample_rate);

// <stem>.wav plus <stem>.json carrying env, provenance, seed and rate.
struct RirRecord {
  Rir rir;
  AcousticEnv env;
  uint64_t seed = 0;
};

std::filesystem::path sidecar_path(const std::filesystem::path& wav_path);
void save_rir(const std::filesystem::path& wav_path, const RirRecord& record);
RirRecord load_rir(const std::filesystem::path& wav_path);

}  // namespace fastrir

#endif  // FASTRIR_IO_H_
