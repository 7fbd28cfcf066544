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

#ifndef FASTRIR_ENV_H_
#define FASTRIR_ENV_H_

#include <array>
#include <cstdint>

#include "json.hpp"

namespace fastrir {

using Vec3 = std::array<double, 3>;

inline constexpr double kDefaultSpeedOfSound = 343.0;  // m/s
inline constexpr double kEmbeddingBound = 1.2;
inline constexpr int kEmbeddingSize = 10;

// A shoebox room with one source and one listener. SI units throughout.
struct AcousticEnv {
  Vec3 room_dims{};
  Vec3 source_pos{};
  Vec3 listener_pos{};
  double t60 = 0.0;

  bool operator==(const AcousticEnv&) const = default;
};

// Throws RangeError naming the violated field.
void validate(const AcousticEnv& env);

double distance(const Vec3& a, const Vec3& b);

// Conditioning vector ordered (L, W, H, listener xyz, source xyz, T60), each
// entry in [-1.2, 1.2].
struct EmbeddingVec {
  std::array<double, kEmbeddingSize> values{};

  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
};

struct NormalizationConfig {
  double d_max = 11.0;   // largest room dimension of the corpus, m
  double t60_max = 0.7;  // s
};

void validate(const NormalizationConfig& cfg);

// Affine map x -> 2.4 x / max - 1.2 per coordinate.
EmbeddingVec build_embedding(const AcousticEnv& env,
                             const NormalizationConfig& cfg);
AcousticEnv invert_embedding(const EmbeddingVec& vec,
                             const NormalizationConfig& cfg);

// Average absorption coefficient from Sabine's formula,
// 0.161 V / (S T60). Throws InfeasibleT60Error if it exceeds 1.
double sabine_absorption(const Vec3& room_dims, double t60);

// Smallest T60 the room supports (absorption exactly 1).
double min_feasible_t60(const Vec3& room_dims);

// Uniform source and listener placement at least `wall_margin` from every
// wall, T60 uniform in [t60_lo, t60_hi]. Deterministic in `seed`.
AcousticEnv sample_environment(uint64_t seed, const Vec3& room_dims,
                               double t60_lo, double t60_hi,
                               double wall_margin = 0.3);

nlohmann::json env_to_json(const AcousticEnv& env);
AcousticEnv env_from_json(const nlohmann::json& j);

}  // namespace fastrir

#endif  // FASTRIR_ENV_H_
