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

#ifndef FASTRIR_RIR_H_
#define FASTRIR_RIR_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fastrir/env.h"

namespace fastrir {

enum class Provenance { kImageMethod, kDiffuseHybrid, kNeural };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

// Mono impulse response, peak-normalized to |h| <= 1.
struct Rir {
  std::vector<double> samples;
  int sample_rate = 16000;
  Provenance provenance = Provenance::kDiffuseHybrid;

  size_t length() const { return samples.size(); }
  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

struct SynthConfig {
  double speed_of_sound = kDefaultSpeedOfSound;
  int sample_rate = 16000;
  int length = 4096;
  // Unset: reflection order where the per-path reflection loss reaches
  // energy_floor_db.
  std::optional<int> max_image_order;
  double energy_floor_db = -60.0;
  // Unset: max(2 sqrt(V) ms, direct-path delay + 2 ms).
  std::optional<double> mixing_time_ms;
  double diffuse_density = 20000.0;  // arrivals per second
  uint64_t seed = 0;
};

void validate(const SynthConfig& cfg);

}  // namespace fastrir

#endif  // FASTRIR_RIR_H_
