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

#include "fastrir/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fastrir/error.h"
#include "fastrir/parallel.h"

namespace fastrir {

namespace {

constexpr double kDbPerNeper = 10.0 / M_LN10;  // d(10 log10 x)/dx * x

std::string fmt_db(double db) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f dB", db);
  return buf;
}

// Energy remaining from each sample to the truncation point.
struct BackwardEnergy {
  std::vector<double> remaining;  // size == end
  long end = 0;
};

BackwardEnergy backward_energy(std::span<const double> h) {
  BackwardEnergy be;
  long end = static_cast<long>(h.size());
  while (end > 0 && h[end - 1] == 0.0) --end;
  if (end == 0) throw DegenerateInputError("impulse response is all zeros");
  be.end = end;
  be.remaining.resize(end);
  double acc = 0.0;
  for (long n = end - 1; n >= 0; --n) {
    acc += h[n] * h[n];
    be.remaining[n] = acc;
  }
  return be;
}

// Least-squares line through z_n = 10 log10(remaining_n + tail) on the window.
struct LineFit {
  double slope = 0.0;
  double mean_z = 0.0;
  double mean_n = 0.0;
  double sxx = 0.0;
  long count = 0;

  // Line value extrapolated to the truncation point.
  double at(long n) const { return mean_z + slope * (n - mean_n); }
};

LineFit fit_line(const std::vector<double>& remaining, double tail,
                 const FitWindow& w) {
  LineFit f;
  f.count = w.last - w.begin + 1;
  f.mean_n = 0.5 * static_cast<double>(w.begin + w.last);
  const double m = static_cast<double>(f.count);
  f.sxx = m * (m * m - 1.0) / 12.0;
  double sum_z = 0.0, sum_xz = 0.0;
  for (long n = w.begin; n <= w.last; ++n) {
    const double z = 10.0 * std::log10(remaining[n] + tail);
    sum_z += z;
    sum_xz += (n - f.mean_n) * z;
  }
  f.mean_z = sum_z / m;
  f.slope = sum_xz / f.sxx;
  return f;
}

// Weight of z_n in the extrapolated line value at `end`.
double extrapolation_weight(const LineFit& f, long n, long end) {
  return 1.0 / f.count + (n - f.mean_n) / f.sxx * (end - f.mean_n);
}

// Solves tail = 10^(line(end)/10) for a fixed window by Newton's method.
double solve_tail_energy(const std::vector<double>& remaining,
                         const FitWindow& w) {
  const double total = remaining[0];
  double tail = 0.0;
  for (int it = 0; it < 200; ++it) {
    const LineFit f = fit_line(remaining, tail, w);
    const double p = std::pow(10.0, f.at(w.end) / 10.0);
    double dp = 0.0;
    for (long n = w.begin; n <= w.last; ++n) {
      dp += extrapolation_weight(f, n, w.end) / (remaining[n] + tail);
    }
    dp *= p;
    const double denom = 1.0 - dp;
    double next = denom > 0.05 ? tail - (tail - p) / denom : p;
    if (next < 0.0) next = p;
    if (!std::isfinite(next) || next > 1e6 * total) {
      throw EstimationError("truncation compensation diverged",
                            10.0 * std::log10(remaining[w.last] / total));
    }
    const bool done = std::abs(next - tail) <= 1e-15 * (total + next);
    tail = next;
    if (done) break;
  }
  return tail;
}

long first_at_or_below(const std::vector<double>& remaining, double tail,
                       double level_db, long from) {
  const double ref = remaining[0] + tail;
  const double threshold = ref * std::pow(10.0, level_db / 10.0);
  const long end = static_cast<long>(remaining.size());
  for (long n = from; n < end; ++n) {
    if (remaining[n] + tail <= threshold) return n;
  }
  return -1;
}

FitWindow choose_window(const BackwardEnergy& be, double tail,
                        const T60Options& opts, double* lowest_db) {
  const double ref = be.remaining[0] + tail;
  const double lowest =
      10.0 * std::log10((be.remaining[be.end - 1] + tail) / ref);
  *lowest_db = lowest;
  const long begin = first_at_or_below(be.remaining, tail, -5.0, 0);
  if (begin < 0) {
    throw EstimationError("decay curve never reaches -5 dB (lowest " +
                              fmt_db(lowest) + ")",
                          lowest);
  }
  const double lower = opts.range == DecayRange::kT20 ? -25.0 : -35.0;
  double level = lower;
  if (lowest > lower) {
    level = lowest + 1.0;
    if (level > -5.0 - opts.min_span_db) {
      throw EstimationError("insufficient decay range: curve reaches only " +
                                fmt_db(lowest),
                            lowest);
    }
  }
  const long last = first_at_or_below(be.remaining, tail, level, begin);
  if (last < begin + 2) {
    throw EstimationError("fit window too short", lowest);
  }
  return {begin, last, be.end};
}

double t60_from_slope(double slope, int sample_rate, double lowest_db) {
  if (!(slope < 0.0)) {
    throw EstimationError("decay curve is not decaying", lowest_db);
  }
  return -60.0 / (slope * sample_rate);
}

}  // namespace

EnergyDecayCurve schroeder_edc(std::span<const double> h, int sample_rate,
                               double floor_db) {
  EnergyDecayCurve edc;
  edc.sample_rate = sample_rate;
  edc.values_db.assign(h.size(), floor_db);
  std::vector<double> acc(h.size());
  double sum = 0.0;
  for (long n = static_cast<long>(h.size()) - 1; n >= 0; --n) {
    sum += h[n] * h[n];
    acc[n] = sum;
  }
  const double total = acc.empty() ? 0.0 : acc[0];
  if (total == 0.0) {
    throw DegenerateInputError("impulse response is all zeros");
  }
  for (size_t n = 0; n < h.size(); ++n) {
    if (acc[n] > 0.0) {
      edc.values_db[n] = std::max(floor_db, 10.0 * std::log10(acc[n] / total));
    }
  }
  return edc;
}

EnergyDecayCurve schroeder_edc(const Rir& rir, double floor_db) {
  return schroeder_edc(rir.samples, rir.sample_rate, floor_db);
}

T60Fit fit_t60(std::span<const double> h, int sample_rate,
               const T60Options& opts) {
  const BackwardEnergy be = backward_energy(h);
  T60Fit fit;
  double tail = 0.0;
  FitWindow window = choose_window(be, tail, opts, &fit.lowest_db);
  if (opts.compensate_truncation) {
    // The window depends on the compensated curve and vice versa; alternate
    // until both settle.
    for (int it = 0; it < 50; ++it) {
      const double next = solve_tail_energy(be.remaining, window);
      const FitWindow next_window =
          choose_window(be, next, opts, &fit.lowest_db);
      const bool settled = next_window == window;
      tail = next;
      window = next_window;
      if (settled) break;
    }
    tail = solve_tail_energy(be.remaining, window);
  }
  const LineFit line = fit_line(be.remaining, tail, window);
  fit.slope_db_per_sample = line.slope;
  fit.t60 = t60_from_slope(line.slope, sample_rate, fit.lowest_db);
  fit.tail_energy = tail;
  fit.window = window;
  return fit;
}

double estimate_t60(const Rir& rir, const T60Options& opts) {
  return fit_t60(rir.samples, rir.sample_rate, opts).t60;
}

double t60_in_window(std::span<const double> h, int sample_rate,
                     const FitWindow& window, bool compensate) {
  return t60_item_loss(h, sample_rate, 0.0, window, compensate).t60;
}

T60ErrorReport t60_error(std::span<const Rir> generated,
                         std::span<const double> targets,
                         const T60Options& opts) {
  if (generated.size() != targets.size()) {
    throw ConfigError("t60_error: batch sizes differ");
  }
  if (generated.empty()) throw ConfigError("t60_error: empty batch");
  const long n = static_cast<long>(generated.size());
  T60ErrorReport report;
  report.estimates.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(n);
  parallel_for(n, [&](long i) {
    try {
      report.estimates[i] = estimate_t60(generated[i], opts);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    if (std::isnan(report.estimates[i])) {
      report.failures.emplace_back(i, errors[i]);
      continue;
    }
    sum += std::abs(report.estimates[i] - targets[i]);
    ++report.used;
  }
  report.mean_abs_error = report.used > 0
                              ? sum / static_cast<double>(report.used)
                              : std::numeric_limits<double>::quiet_NaN();
  return report;
}

Rir crop_at_t60(const Rir& rir, double t60, double threshold) {
  if (!(t60 > 0.0)) throw RangeError("t60", "T60 must be > 0");
  Rir out = rir;
  if (t60 < threshold) {
    const long cut = std::llround(t60 * rir.sample_rate);
    for (long n = std::max(0L, cut); n < static_cast<long>(out.samples.size());
         ++n) {
      out.samples[n] = 0.0;
    }
  }
  return out;
}

T60ItemLoss t60_item_loss(std::span<const double> h, int sample_rate,
                          double target, const FitWindow& window,
                          bool compensate) {
  const BackwardEnergy be = backward_energy(h);
  if (window.end != be.end || window.begin < 0 || window.last >= be.end ||
      window.last < window.begin + 2) {
    throw ConfigError("fit window does not match the impulse response");
  }
  const double tail = compensate ? solve_tail_energy(be.remaining, window) : 0.0;
  const LineFit line = fit_line(be.remaining, tail, window);
  const double lowest =
      10.0 * std::log10((be.remaining[be.end - 1] + tail) /
                        (be.remaining[0] + tail));
  T60ItemLoss out;
  out.t60 = t60_from_slope(line.slope, sample_rate, lowest);
  const double diff = out.t60 - target;
  out.value = std::abs(diff);
  out.grad.assign(h.size(), 0.0);
  if (diff == 0.0) return out;

  // d slope / d remaining_n, including the implicit dependence of the tail
  // term: tail = p(remaining, tail) with p the extrapolated line.
  std::vector<double> g(window.last - window.begin + 1);
  double q = 0.0, dp = 0.0, p = 0.0;
  if (compensate) {
    p = std::pow(10.0, line.at(window.end) / 10.0);
    for (long n = window.begin; n <= window.last; ++n) {
      const double r = 1.0 / (be.remaining[n] + tail);
      q += (n - line.mean_n) / line.sxx * r;
      dp += extrapolation_weight(line, n, window.end) * r;
    }
    dp *= p;
  }
  const double denom = 1.0 - dp;
  for (long n = window.begin; n <= window.last; ++n) {
    const double r = 1.0 / (be.remaining[n] + tail);
    double v = (n - line.mean_n) / line.sxx * r;
    if (compensate) {
      v += q * p * extrapolation_weight(line, n, window.end) * r / denom;
    }
    g[n - window.begin] = kDbPerNeper * v;
  }
  const double dloss_dslope =
      (diff > 0.0 ? 1.0 : -1.0) * 60.0 /
      (line.slope * line.slope * sample_rate);
  // remaining_n depends on h_k for every k >= n.
  double prefix = 0.0;
  for (long k = window.begin; k < be.end; ++k) {
    if (k <= window.last) prefix += g[k - window.begin];
    out.grad[k] = dloss_dslope * prefix * 2.0 * h[k];
  }
  return out;
}

T60LossResult t60_loss_differentiable(
    const std::vector<std::span<const double>>& batch, int sample_rate,
    std::span<const double> targets, const T60Options& opts) {
  if (batch.size() != targets.size()) {
    throw ConfigError("t60 loss: batch sizes differ");
  }
  if (batch.empty()) throw ConfigError("t60 loss: empty batch");
  const long n = static_cast<long>(batch.size());
  T60LossResult result;
  result.grads.resize(n);
  std::vector<char> ok(n, 0);  // vector<bool> is not safe for parallel writes
  std::vector<double> values(n, 0.0);
  parallel_for(n, [&](long i) {
    result.grads[i].assign(batch[i].size(), 0.0);
    try {
      const T60Fit fit = fit_t60(batch[i], sample_rate, opts);
      T60ItemLoss item = t60_item_loss(batch[i], sample_rate, targets[i],
                                       fit.window, opts.compensate_truncation);
      values[i] = item.value;
      result.grads[i] = std::move(item.grad);
      ok[i] = 1;
    } catch (const Error&) {
      // Items without a usable decay contribute neither value nor gradient.
    }
  });
  result.ok.assign(ok.begin(), ok.end());
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    if (!ok[i]) continue;
    sum += values[i];
    ++result.used;
  }
  if (result.used == 0) return result;
  const double scale = 1.0 / static_cast<double>(result.used);
  result.value = sum * scale;
  for (auto& g : result.grads) {
    for (double& x : g) x *= scale;
  }
  return result;
}

}  // namespace fastrir
