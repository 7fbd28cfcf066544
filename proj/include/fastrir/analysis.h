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

#ifndef FASTRIR_ANALYSIS_H_
#define FASTRIR_ANALYSIS_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fastrir/rir.h"

namespace fastrir {

inline constexpr double kDbFloor = -120.0;
inline constexpr double kCropThreshold = 0.25;  // s

// Backward-integrated energy in dB relative to the total energy. Never
// increases; values below the floor are clamped to it.
struct EnergyDecayCurve {
  std::vector<double> values_db;
  int sample_rate = 0;
};

EnergyDecayCurve schroeder_edc(std::span<const double> h, int sample_rate,
                               double floor_db = kDbFloor);
EnergyDecayCurve schroeder_edc(const Rir& rir, double floor_db = kDbFloor);

enum class DecayRange {
  kT20,  // fit -5 .. -25 dB, extrapolate x3
  kT30,  // fit -5 .. -35 dB, extrapolate x2
};

struct T60Options {
  DecayRange range = DecayRange::kT20;
  // Adds the energy lost to truncation (the fitted decay extrapolated past
  // the last sample) back into the integral.
  bool compensate_truncation = true;
  // When the curve never reaches the lower fit level, fit down to the lowest
  // level reached instead, provided it spans at least this many dB below -5.
  double min_span_db = 10.0;
};

// Least-squares fit region of a decay curve: samples [begin, last] are
// fitted; `end` is the truncation point (one past the last nonzero sample).
struct FitWindow {
  long begin = 0;
  long last = 0;
  long end = 0;

  bool operator==(const FitWindow&) const = default;
};

struct T60Fit {
  double t60 = 0.0;
  double slope_db_per_sample = 0.0;
  double tail_energy = 0.0;  // compensation term, 0 when disabled
  double lowest_db = 0.0;    // lowest level of the (compensated) curve
  FitWindow window;
};

// Throws DegenerateInputError for silence and EstimationError when the decay
// range is insufficient or the decay is not a decay.
T60Fit fit_t60(std::span<const double> h, int sample_rate,
               const T60Options& opts = {});
double estimate_t60(const Rir& rir, const T60Options& opts = {});

// T60 from a fixed fit window; the quantity the differentiable loss uses.
double t60_in_window(std::span<const double> h, int sample_rate,
                     const FitWindow& window, bool compensate = true);

struct T60ErrorReport {
  double mean_abs_error = 0.0;  // NaN when no item could be estimated
  size_t used = 0;
  std::vector<double> estimates;  // NaN where estimation failed
  std::vector<std::pair<size_t, std::string>> failures;
};

T60ErrorReport t60_error(std::span<const Rir> generated,
                         std::span<const double> targets,
                         const T60Options& opts = {});

// Zeroes samples from round(t60 * fs) on when t60 < threshold; otherwise
// returns the input. Length is preserved.
Rir crop_at_t60(const Rir& rir, double t60, double threshold = kCropThreshold);

struct T60ItemLoss {
  double value = 0.0;  // |T60(h) - target|
  double t60 = 0.0;
  std::vector<double> grad;  // d value / d h
};

// Exact gradient of |T60 - target| with the fit window held constant. The
// compensation term is differentiated implicitly through its fixed point.
T60ItemLoss t60_item_loss(std::span<const double> h, int sample_rate,
                          double target, const FitWindow& window,
                          bool compensate = true);

struct T60LossResult {
  double value = 0.0;  // mean over items that could be estimated
  size_t used = 0;
  std::vector<std::vector<double>> grads;  // zero for failed items
  std::vector<bool> ok;
};

// Batch form of the T60 loss. Windows come from fit_t60 on the forward pass
// and are treated as constants (straight-through) for the gradient.
T60LossResult t60_loss_differentiable(
    const std::vector<std::span<const double>>& batch, int sample_rate,
    std::span<const double> targets, const T60Options& opts = {});

}  // namespace fastrir

#endif  // FASTRIR_ANALYSIS_H_
