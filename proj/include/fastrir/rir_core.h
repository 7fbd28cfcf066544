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

#ifndef FASTRIR_RIR_CORE_H_
#define FASTRIR_RIR_CORE_H_

#include <span>
#include <vector>

#include "fastrir/env.h"
#include "fastrir/rir.h"

namespace fastrir {

inline constexpr int kFractionalDelayTaps = 8;

// Adds `gain` at fractional position `delay` (samples) using an 8-tap
// Hann-windowed sinc. Taps falling outside `out` are dropped.
void add_fractional_impulse(std::span<double> out, double delay, double gain);

// Reflection coefficient shared by all six walls, sqrt(1 - absorption).
double wall_reflection(const AcousticEnv& env);

// Reflection order used when SynthConfig::max_image_order is unset.
int auto_image_order(double beta, double energy_floor_db);

// Specular image-source response, peak-normalized, cfg.length samples.
Rir image_method_rir(const AcousticEnv& env, const SynthConfig& cfg);

double mixing_time_seconds(const AcousticEnv& env, const SynthConfig& cfg);

struct DiffuseTailResult {
  Rir rir;
  // Set when the mixing time falls beyond the response; rir is then the
  // specular input unchanged.
  bool mixing_beyond_end = false;
};

// Replaces the specular response after the mixing time with a Poisson-arrival
// Gaussian tail whose energy decays 60 dB per T60.
DiffuseTailResult diffuse_tail(const AcousticEnv& env, const Rir& specular,
                               const SynthConfig& cfg);

// Ground-truth generator: image method followed by the diffuse tail.
Rir generate_reference_rir(const AcousticEnv& env, const SynthConfig& cfg);

// Peak-normalizes in place; returns the divisor applied (1 for silence).
double peak_normalize(std::span<double> samples);

// Reference RIRs for a batch, parallel over items. Item i uses
// derive_seed(cfg.seed, i) for its tail.
std::vector<Rir> generate_reference_batch(std::span<const AcousticEnv> envs,
                                          const SynthConfig& cfg);

}  // namespace fastrir

#endif  // FASTRIR_RIR_CORE_H_
