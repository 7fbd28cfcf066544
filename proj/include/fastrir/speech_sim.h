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

#ifndef FASTRIR_SPEECH_SIM_H_
#define FASTRIR_SPEECH_SIM_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fastrir/dataset.h"
#include "fastrir/rir.h"

namespace fastrir {

struct SpeechSegment {
  std::vector<double> samples;
  int sample_rate = 16000;
  std::string source_id;
  long start_offset = 0;  // samples into the original recording
};

// "<source_id>_<start_offset>"
std::string segment_id(const SpeechSegment& s);

// Full linear convolution (length N + M - 1) by FFT overlap-add.
std::vector<double> fft_convolve(std::span<const double> x,
                                 std::span<const double> h);

struct ConvolveResult {
  SpeechSegment segment;
  double gain_applied = 1.0;  // < 1 when the output was scaled to avoid clipping
};

// Reverberates a segment. The output is scaled to peak 1 only if it would
// otherwise clip.
ConvolveResult convolve_speech(const SpeechSegment& clean, const Rir& rir);

struct SilenceConfig {
  double threshold_dbfs = -40.0;
  double frame_seconds = 0.01;
  double min_silence_seconds = 3.0;
};

// Splits at the first frame of every silence run of at least
// min_silence_seconds. Segments partition the input.
std::vector<SpeechSegment> split_on_silence(const SpeechSegment& recording,
                                            const SilenceConfig& cfg = {});

// Uniform seeded RIR choice per segment.
std::vector<size_t> choose_rirs(size_t n_segments, size_t n_rirs, uint64_t seed);

struct ReverbPairing {
  std::string segment_id;
  std::string rir_id;
  double gain_applied = 1.0;
  std::string output_path;
};

struct ReverbReport {
  std::vector<ReverbPairing> pairs;
  std::vector<std::pair<std::string, std::string>> failures;  // segment, error

  // segment_id,rir_id,gain_applied
  std::string csv() const;
};

// Convolves every segment with a manifest RIR and writes
// <out_dir>/<segment_id>.wav. RIR paths resolve against manifest_dir.
ReverbReport reverberate_corpus(std::span<const SpeechSegment> segments,
                                const CorpusManifest& manifest,
                                const std::filesystem::path& manifest_dir,
                                const std::filesystem::path& out_dir,
                                uint64_t seed);

}  // namespace fastrir

#endif  // FASTRIR_SPEECH_SIM_H_
