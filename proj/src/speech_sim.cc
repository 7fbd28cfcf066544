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

#include "fastrir/speech_sim.h"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>

#include "fastrir/error.h"
#include "fastrir/io.h"
#include "fastrir/parallel.h"
#include "fastrir/rng.h"

namespace fastrir {

namespace fs = std::filesystem;

namespace {

// Shorter filters are cheaper to apply directly.
constexpr size_t kDirectConvolutionTaps = 32;

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

class RealFft {
 public:
  explicit RealFft(size_t n) : n_(n) {
    std::lock_guard lock(planner_mutex());
    time_ = fftw_alloc_real(n);
    freq_ = fftw_alloc_complex(n / 2 + 1);
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), time_, freq_,
                                    FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), freq_, time_,
                                    FFTW_ESTIMATE);
    if (!time_ || !freq_ || !forward_ || !inverse_) {
      throw Error("FFTW plan creation failed for size " + std::to_string(n));
    }
  }
  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(time_);
    fftw_free(freq_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  size_t size() const { return n_; }
  double* time() { return time_; }
  std::complex<double>* freq() {
    return reinterpret_cast<std::complex<double>*>(freq_);
  }
  void forward() { fftw_execute(forward_); }
  void inverse() { fftw_execute(inverse_); }

 private:
  size_t n_;
  double* time_ = nullptr;
  fftw_complex* freq_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace

std::string segment_id(const SpeechSegment& s) {
  return s.source_id + "_" + std::to_string(s.start_offset);
}

std::vector<double> fft_convolve(std::span<const double> x,
                                 std::span<const double> h) {
  if (x.empty() || h.empty()) {
    throw DegenerateInputError("convolution of an empty signal");
  }
  const size_t out_len = x.size() + h.size() - 1;
  // Filter the longer-or-equal signal with blocks of the shorter one's size.
  if (h.size() > x.size()) std::swap(x, h);
  const size_t m = h.size();
  if (m <= kDirectConvolutionTaps) {
    std::vector<double> y(out_len, 0.0);
    for (size_t i = 0; i < x.size(); ++i) {
      for (size_t k = 0; k < m; ++k) y[i + k] += x[i] * h[k];
    }
    return y;
  }
  const size_t n_fft = std::bit_ceil(std::max<size_t>(2 * m, 64));
  const size_t block = n_fft - m + 1;

  RealFft fft(n_fft);
  std::fill_n(fft.time(), n_fft, 0.0);
  std::copy(h.begin(), h.end(), fft.time());
  fft.forward();
  const size_t bins = n_fft / 2 + 1;
  std::vector<std::complex<double>> hf(fft.freq(), fft.freq() + bins);

  std::vector<double> y(out_len, 0.0);
  const double scale = 1.0 / static_cast<double>(n_fft);
  for (size_t start = 0; start < x.size(); start += block) {
    const size_t len = std::min(block, x.size() - start);
    std::fill_n(fft.time(), n_fft, 0.0);
    std::copy_n(x.begin() + start, len, fft.time());
    fft.forward();
    std::complex<double>* xf = fft.freq();
    for (size_t k = 0; k < bins; ++k) xf[k] *= hf[k];
    fft.inverse();
    const size_t valid = std::min(len + m - 1, out_len - start);
    for (size_t i = 0; i < valid; ++i) y[start + i] += fft.time()[i] * scale;
  }
  return y;
}

ConvolveResult convolve_speech(const SpeechSegment& clean, const Rir& rir) {
  if (clean.sample_rate != rir.sample_rate) {
    throw ConfigError("sample rate mismatch: speech " +
                      std::to_string(clean.sample_rate) + " Hz, RIR " +
                      std::to_string(rir.sample_rate) + " Hz");
  }
  ConvolveResult out;
  out.segment.sample_rate = clean.sample_rate;
  out.segment.source_id = clean.source_id;
  out.segment.start_offset = clean.start_offset;
  out.segment.samples = fft_convolve(clean.samples, rir.samples);
  double peak = 0.0;
  for (double v : out.segment.samples) peak = std::max(peak, std::abs(v));
  if (peak > 1.0) {
    out.gain_applied = 1.0 / peak;
    for (double& v : out.segment.samples) v *= out.gain_applied;
  }
  return out;
}

std::vector<SpeechSegment> split_on_silence(const SpeechSegment& recording,
                                            const SilenceConfig& cfg) {
  if (recording.samples.empty()) {
    throw DegenerateInputError("cannot split an empty recording");
  }
  if (!(cfg.frame_seconds > 0) || !(cfg.min_silence_seconds > 0)) {
    throw ConfigError("frame and minimum silence durations must be > 0");
  }
  const size_t n = recording.samples.size();
  const size_t frame = std::max<size_t>(
      1, static_cast<size_t>(std::llround(cfg.frame_seconds * recording.sample_rate)));
  const double threshold = std::pow(10.0, cfg.threshold_dbfs / 20.0);
  const double min_run = cfg.min_silence_seconds * recording.sample_rate;

  std::vector<size_t> splits;
  size_t run_start = 0, run_len = 0;
  bool in_run = false, run_split = false;
  for (size_t f0 = 0; f0 < n; f0 += frame) {
    const size_t f1 = std::min(n, f0 + frame);
    double energy = 0.0;
    for (size_t i = f0; i < f1; ++i) energy += recording.samples[i] * recording.samples[i];
    const bool silent = std::sqrt(energy / (f1 - f0)) < threshold;
    if (!silent) {
      in_run = false;
      continue;
    }
    if (!in_run) {
      in_run = true;
      run_split = false;
      run_start = f0;
      run_len = 0;
    }
    run_len += f1 - f0;
    if (!run_split && run_len >= min_run) {
      run_split = true;
      if (run_start > 0) splits.push_back(run_start);
    }
  }

  std::vector<SpeechSegment> out;
  size_t begin = 0;
  splits.push_back(n);
  for (size_t end : splits) {
    SpeechSegment seg;
    seg.sample_rate = recording.sample_rate;
    seg.source_id = recording.source_id;
    seg.start_offset = recording.start_offset + static_cast<long>(begin);
    seg.samples.assign(recording.samples.begin() + begin,
                       recording.samples.begin() + end);
    out.push_back(std::move(seg));
    begin = end;
  }
  return out;
}

std::vector<size_t> choose_rirs(size_t n_segments, size_t n_rirs,
                                uint64_t seed) {
  if (n_rirs == 0) throw ConfigError("no RIRs to choose from");
  std::vector<size_t> out(n_segments);
  for (size_t i = 0; i < n_segments; ++i) {
    Rng rng(derive_seed(seed, i));
    out[i] = rng.index(n_rirs);
  }
  return out;
}

std::string ReverbReport::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "segment_id,rir_id,gain_applied\n";
  for (const auto& p : pairs) {
    os << p.segment_id << ',' << p.rir_id << ',' << p.gain_applied << '\n';
  }
  return os.str();
}

ReverbReport reverberate_corpus(std::span<const SpeechSegment> segments,
                                const CorpusManifest& manifest,
                                const fs::path& manifest_dir,
                                const fs::path& out_dir, uint64_t seed) {
  if (segments.empty()) throw ConfigError("no speech segments to reverberate");
  if (manifest.items.empty()) throw ConfigError("manifest has no RIRs");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string());

  const std::vector<size_t> choice =
      choose_rirs(segments.size(), manifest.items.size(), seed);
  std::vector<ReverbPairing> pairs(segments.size());
  std::vector<std::string> errors(segments.size());
  parallel_for(static_cast<long>(segments.size()), [&](long i) {
    const CorpusItem& item = manifest.items[choice[i]];
    ReverbPairing& p = pairs[i];
    p.segment_id = segment_id(segments[i]);
    p.rir_id = item.id;
    try {
      const Rir rir = load_rir(manifest_dir / item.rir_path).rir;
      const ConvolveResult r = convolve_speech(segments[i], rir);
      p.gain_applied = r.gain_applied;
      p.output_path = (out_dir / (p.segment_id + ".wav")).string();
      write_wav(p.output_path, r.segment.samples, r.segment.sample_rate);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  ReverbReport report;
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (errors[i].empty()) {
      report.pairs.push_back(std::move(pairs[i]));
    } else {
      report.failures.emplace_back(pairs[i].segment_id, errors[i]);
    }
  }
  return report;
}

}  // namespace fastrir
