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

#include "fastrir/env.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastrir/error.h"
#include "fastrir/rng.h"

namespace fastrir {

namespace {

const char* const kAxis[3] = {"x", "y", "z"};

std::string field_name(const char* vec, int axis) {
  return std::string(vec) + "." + kAxis[axis];
}

Vec3 vec3_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw RangeError(key, "missing");
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) {
    throw RangeError(key, "expected an array of 3 numbers");
  }
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

}  // namespace

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void validate(const AcousticEnv& env) {
  for (int i = 0; i < 3; ++i) {
    if (!(env.room_dims[i] > 0.0)) {
      throw RangeError(field_name("room", i), "room dimension must be > 0");
    }
  }
  for (int i = 0; i < 3; ++i) {
    if (!(env.source_pos[i] >= 0.0 && env.source_pos[i] <= env.room_dims[i])) {
      throw RangeError(field_name("source", i), "source outside the room");
    }
    if (!(env.listener_pos[i] >= 0.0 &&
          env.listener_pos[i] <= env.room_dims[i])) {
      throw RangeError(field_name("listener", i), "listener outside the room");
    }
  }
  if (env.source_pos == env.listener_pos) {
    throw RangeError("source", "source and listener coincide");
  }
  if (!(env.t60 > 0.0)) throw RangeError("t60", "T60 must be > 0");
}

void validate(const NormalizationConfig& cfg) {
  if (!(cfg.d_max > 0.0)) throw RangeError("d_max", "must be > 0");
  if (!(cfg.t60_max > 0.0)) throw RangeError("t60_max", "must be > 0");
}

EmbeddingVec build_embedding(const AcousticEnv& env,
                             const NormalizationConfig& cfg) {
  validate(env);
  validate(cfg);
  const auto map = [](double x, double max) {
    return 2.0 * kEmbeddingBound * x / max - kEmbeddingBound;
  };
  const Vec3* vecs[3] = {&env.room_dims, &env.listener_pos, &env.source_pos};
  const char* names[3] = {"room", "listener", "source"};
  EmbeddingVec out;
  for (int v = 0; v < 3; ++v) {
    for (int i = 0; i < 3; ++i) {
      const double x = (*vecs[v])[i];
      if (x > cfg.d_max) {
        throw RangeError(field_name(names[v], i),
                         "exceeds d_max " + std::to_string(cfg.d_max));
      }
      out[3 * v + i] = map(x, cfg.d_max);
    }
  }
  if (env.t60 > cfg.t60_max) {
    throw RangeError("t60", "exceeds t60_max " + std::to_string(cfg.t60_max));
  }
  out[9] = map(env.t60, cfg.t60_max);
  return out;
}

AcousticEnv invert_embedding(const EmbeddingVec& vec,
                             const NormalizationConfig& cfg) {
  validate(cfg);
  for (int i = 0; i < kEmbeddingSize; ++i) {
    if (!(std::abs(vec[i]) <= kEmbeddingBound)) {
      throw RangeError("embedding[" + std::to_string(i) + "]",
                       "outside [-1.2, 1.2]");
    }
  }
  const auto unmap = [](double e, double max) {
    return (e + kEmbeddingBound) * max / (2.0 * kEmbeddingBound);
  };
  AcousticEnv env;
  for (int i = 0; i < 3; ++i) {
    env.room_dims[i] = unmap(vec[i], cfg.d_max);
    env.listener_pos[i] = unmap(vec[3 + i], cfg.d_max);
    env.source_pos[i] = unmap(vec[6 + i], cfg.d_max);
  }
  env.t60 = unmap(vec[9], cfg.t60_max);
  return env;
}

double sabine_absorption(const Vec3& room_dims, double t60) {
  for (int i = 0; i < 3; ++i) {
    if (!(room_dims[i] > 0.0)) {
      throw RangeError(field_name("room", i), "room dimension must be > 0");
    }
  }
  if (!(t60 > 0.0)) throw RangeError("t60", "T60 must be > 0");
  const auto [l, w, h] = room_dims;
  const double volume = l * w * h;
  const double surface = 2.0 * (l * w + l * h + w * h);
  const double alpha = 0.161 * volume / (surface * t60);
  // Round-off at the feasibility boundary (t60 == min_feasible_t60).
  if (alpha > 1.0 + 1e-12) throw InfeasibleT60Error(t60, alpha);
  return std::min(alpha, 1.0);
}

double min_feasible_t60(const Vec3& room_dims) {
  const auto [l, w, h] = room_dims;
  return 0.161 * l * w * h / (2.0 * (l * w + l * h + w * h));
}

AcousticEnv sample_environment(uint64_t seed, const Vec3& room_dims,
                               double t60_lo, double t60_hi,
                               double wall_margin) {
  for (int i = 0; i < 3; ++i) {
    if (!(room_dims[i] > 2.0 * wall_margin)) {
      throw ConfigError("room dimension " + std::to_string(room_dims[i]) +
                        " m leaves no interior with wall margin " +
                        std::to_string(wall_margin) + " m");
    }
  }
  if (!(t60_lo > 0.0 && t60_lo <= t60_hi)) {
    throw ConfigError("T60 range must satisfy 0 < lo <= hi");
  }
  Rng rng(seed);
  AcousticEnv env;
  env.room_dims = room_dims;
  const auto place = [&](Vec3& p) {
    for (int i = 0; i < 3; ++i) {
      p[i] = rng.uniform(wall_margin, room_dims[i] - wall_margin);
    }
  };
  place(env.source_pos);
  do {
    place(env.listener_pos);
  } while (distance(env.source_pos, env.listener_pos) < 1e-6);
  // Draws that would need absorption above 1 are redrawn.
  const double t60_min = min_feasible_t60(room_dims);
  if (t60_min > t60_hi) {
    throw ConfigError("no Sabine-feasible T60 in [" + std::to_string(t60_lo) +
                      ", " + std::to_string(t60_hi) + "] s for this room (min " +
                      std::to_string(t60_min) + " s)");
  }
  do {
    env.t60 = rng.uniform(t60_lo, t60_hi);
  } while (env.t60 < t60_min);
  return env;
}

nlohmann::json env_to_json(const AcousticEnv& env) {
  return {{"room", env.room_dims},
          {"source", env.source_pos},
          {"listener", env.listener_pos},
          {"t60", env.t60}};
}

AcousticEnv env_from_json(const nlohmann::json& j) {
  AcousticEnv env;
  env.room_dims = vec3_from_json(j, "room");
  env.source_pos = vec3_from_json(j, "source");
  env.listener_pos = vec3_from_json(j, "listener");
  if (!j.contains("t60")) throw RangeError("t60", "missing");
  env.t60 = j.at("t60").get<double>();
  return env;
}

}  // namespace fastrir
