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

#include "fastrir/rir_core.h"

#include <algorithm>
#include <cmath>

#include "fastrir/error.h"
#include "fastrir/parallel.h"
#include "fastrir/rng.h"

namespace fastrir {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kImageMethod:
      return "image_method";
    case Provenance::kDiffuseHybrid:
      return "diffuse_hybrid";
    case Provenance::kNeural:
      return "neural";
  }
  return "unknown";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "image_method") return Provenance::kImageMethod;
  if (s == "diffuse_hybrid") return Provenance::kDiffuseHybrid;
  if (s == "neural") return Provenance::kNeural;
  throw RangeError("provenance", "unknown value '" + s + "'");
}

void validate(const SynthConfig& cfg) {
  if (!(cfg.speed_of_sound > 0.0)) {
    throw ConfigError("speed_of_sound must be > 0");
  }
  if (cfg.sample_rate <= 0) throw ConfigError("sample_rate must be > 0");
  if (cfg.length <= 0) throw ConfigError("length must be > 0");
  if (cfg.max_image_order && *cfg.max_image_order < 0) {
    throw ConfigError("max_image_order must be >= 0");
  }
  if (!(cfg.energy_floor_db < 0.0)) {
    throw ConfigError("energy_floor_db must be negative");
  }
  if (cfg.mixing_time_ms && *cfg.mixing_time_ms < 0.0) {
    throw ConfigError("mixing_time_ms must be >= 0");
  }
  if (cfg.diffuse_density < 0.0) {
    throw ConfigError("diffuse_density must be >= 0");
  }
}

void add_fractional_impulse(std::span<double> out, double delay, double gain) {
  constexpr int kHalf = kFractionalDelayTaps / 2;
  const long base = static_cast<long>(std::floor(delay));
  const long size = static_cast<long>(out.size());
  for (long n = base - (kHalf - 1); n <= base + kHalf; ++n) {
    if (n < 0 || n >= size) continue;
    const double x = static_cast<double>(n) - delay;
    const double sinc = x == 0.0 ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
    const double window = 0.5 * (1.0 + std::cos(M_PI * x / kHalf));
    out[n] += gain * sinc * window;
  }
}

double wall_reflection(const AcousticEnv& env) {
  return std::sqrt(1.0 - sabine_absorption(env.room_dims, env.t60));
}

int auto_image_order(double beta, double energy_floor_db) {
  if (beta <= 0.0) return 0;
  if (beta >= 1.0) {
    throw ConfigError("reflection coefficient >= 1 never decays");
  }
  return static_cast<int>(std::ceil(energy_floor_db / (20.0 * std::log10(beta))));
}

double peak_normalize(std::span<double> samples) {
  double peak = 0.0;
  for (double s : samples) peak = std::max(peak, std::abs(s));
  if (peak == 0.0) return 1.0;
  for (double& s : samples) s /= peak;
  return peak;
}

namespace {

struct AxisImage {
  double offset;  // image coordinate minus listener coordinate
  int reflections;
};

// Images along one axis: coordinate (1 - 2q) s + 2 m L, reflection count
// |m - q| + |m|.
std::vector<AxisImage> axis_images(double room, double src, double lst,
                                   int max_order, double max_dist) {
  const int by_order = max_order / 2 + 1;
  const int by_time =
      static_cast<int>(std::ceil((max_dist + room) / (2.0 * room)));
  const int n = std::min(by_order, by_time);
  std::vector<AxisImage> out;
  out.reserve(2 * (2 * n + 1));
  for (int m = -n; m <= n; ++m) {
    for (int q = 0; q <= 1; ++q) {
      const int refl = std::abs(m - q) + std::abs(m);
      if (refl > max_order) continue;
      const double coord = (1 - 2 * q) * src + 2.0 * m * room;
      out.push_back({coord - lst, refl});
    }
  }
  return out;
}

}  // namespace

Rir image_method_rir(const AcousticEnv& env, const SynthConfig& cfg) {
  validate(env);
  validate(cfg);
  const double beta = wall_reflection(env);
  const int order = cfg.max_image_order.value_or(
      auto_image_order(beta, cfg.energy_floor_db));
  const double fs = cfg.sample_rate;
  const double c = cfg.speed_of_sound;
  const double max_delay = cfg.length + kFractionalDelayTaps / 2;
  const double max_dist = max_delay * c / fs;

  std::vector<AxisImage> axes[3];
  for (int i = 0; i < 3; ++i) {
    axes[i] = axis_images(env.room_dims[i], env.source_pos[i],
                          env.listener_pos[i], order, max_dist);
  }
  // beta^k for every reachable order; pow(0, 0) = 1 keeps the direct path.
  std::vector<double> gain_of_order(order + 1);
  for (int k = 0; k <= order; ++k) gain_of_order[k] = std::pow(beta, k);

  Rir rir;
  rir.sample_rate = cfg.sample_rate;
  rir.provenance = Provenance::kImageMethod;
  rir.samples.assign(cfg.length, 0.0);
  for (const AxisImage& ix : axes[0]) {
    for (const AxisImage& iy : axes[1]) {
      const int oxy = ix.reflections + iy.reflections;
      if (oxy > order) continue;
      for (const AxisImage& iz : axes[2]) {
        const int o = oxy + iz.reflections;
        if (o > order || gain_of_order[o] == 0.0) continue;
        const double d = std::sqrt(ix.offset * ix.offset +
                                   iy.offset * iy.offset +
                                   iz.offset * iz.offset);
        const double delay = fs * d / c;
        if (delay >= max_delay) continue;
        add_fractional_impulse(rir.samples, delay, gain_of_order[o] / d);
      }
    }
  }
  peak_normalize(rir.samples);
  return rir;
}

double mixing_time_seconds(const AcousticEnv& env, const SynthConfig& cfg) {
  if (cfg.mixing_time_ms) return *cfg.mixing_time_ms * 1e-3;
  const double volume = env.room_dims[0] * env.room_dims[1] * env.room_dims[2];
  const double direct =
      distance(env.source_pos, env.listener_pos) / cfg.speed_of_sound;
  return std::max(2.0 * std::sqrt(volume) * 1e-3, direct + 2e-3);
}

DiffuseTailResult diffuse_tail(const AcousticEnv& env, const Rir& specular,
                               const SynthConfig& cfg) {
  validate(env);
  validate(cfg);
  DiffuseTailResult result{specular, false};
  result.rir.provenance = Provenance::kDiffuseHybrid;
  if (cfg.diffuse_density == 0.0) return result;

  const double fs = specular.sample_rate;
  const long size = static_cast<long>(specular.samples.size());
  const long mix = std::lround(mixing_time_seconds(env, cfg) * fs);
  if (mix >= size) {
    result.mixing_beyond_end = true;
    return result;
  }
  const double decay = 3.0 * std::log(10.0) / (env.t60 * fs);  // amplitude, per sample
  // Level at the mixing time from the reflections within 10 ms of it (direct
  // path excluded), each projected along the target decay. Early reflections
  // are sparse, so a short one-sided window can be empty.
  const long direct_end = std::lround(
      (distance(env.source_pos, env.listener_pos) / cfg.speed_of_sound + 1e-3) * fs);
  const long window = std::max(1L, std::lround(0.010 * fs));
  const long win_begin = std::max({0L, direct_end, mix - window});
  const long win_end = std::min(size, mix + window);
  double energy = 0.0;
  for (long n = win_begin; n < win_end; ++n) {
    energy += specular.samples[n] * specular.samples[n] *
              std::exp(2.0 * decay * static_cast<double>(n - mix));
  }
  if (win_end > win_begin) energy /= static_cast<double>(win_end - win_begin);

  // Per-sample arrival counts are Poisson; the sum of `count` unit normals is
  // rescaled so the tail's expected energy follows the envelope exactly.
  const double rate = cfg.diffuse_density / fs;
  const double norm = 1.0 / std::sqrt(rate);
  const double level = std::sqrt(energy);
  const long fade = std::max(1L, std::lround(0.002 * fs));
  Rng rng(cfg.seed);
  std::vector<double>& out = result.rir.samples;
  for (long n = mix; n < size; ++n) {
    const int count = rng.poisson(rate);
    double v = 0.0;
    for (int k = 0; k < count; ++k) v += rng.normal();
    const double tail = v * norm * level * std::exp(-decay * (n - mix));
    if (n < mix + fade) {
      // Equal-power crossfade from the specular part into the tail.
      const double w = (static_cast<double>(n - mix) + 0.5) / fade;
      out[n] = specular.samples[n] * std::cos(0.5 * M_PI * w) +
               tail * std::sin(0.5 * M_PI * w);
    } else {
      out[n] = tail;
    }
  }
  peak_normalize(out);
  return result;
}

Rir generate_reference_rir(const AcousticEnv& env, const SynthConfig& cfg) {
  Rir specular = image_method_rir(env, cfg);
  Rir out = diffuse_tail(env, specular, cfg).rir;
  out.provenance = Provenance::kDiffuseHybrid;
  return out;
}

std::vector<Rir> generate_reference_batch(std::span<const AcousticEnv> envs,
                                          const SynthConfig& cfg) {
  std::vector<Rir> out(envs.size());
  parallel_for(static_cast<long>(envs.size()), [&](long i) {
    SynthConfig item = cfg;
    item.seed = derive_seed(cfg.seed, static_cast<uint64_t>(i));
    out[i] = generate_reference_rir(envs[i], item);
  });
  return out;
}

}  // namespace fastrir
