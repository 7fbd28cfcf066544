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

#ifndef FASTRIR_DATASET_H_
#define FASTRIR_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fastrir/env.h"
#include "fastrir/nn/train.h"
#include "fastrir/rir.h"

namespace fastrir {

// Evenly spaced values with inclusive endpoints; a count of 1 yields lo.
struct AxisRange {
  int count = 1;
  double lo = 0.0;
  double hi = 0.0;

  std::vector<double> values() const;
  bool operator==(const AxisRange&) const = default;
};

struct CorpusGrid {
  AxisRange lengths{15, 8.0, 11.0};
  AxisRange widths{10, 6.0, 8.0};
  AxisRange heights{5, 2.5, 3.5};
  int rirs_per_room = 100;
  double t60_lo = 0.2;
  double t60_hi = 0.7;
  uint64_t seed = 0;
  double wall_margin = 0.3;

  void validate() const;
  size_t total() const;
  bool operator==(const CorpusGrid&) const = default;
};

struct CorpusItem {
  std::string id;
  AcousticEnv env;
  EmbeddingVec embedding;
  std::string rir_path;  // relative to the manifest directory
  uint64_t seed = 0;
};

struct CorpusManifest {
  std::vector<CorpusItem> items;
  CorpusGrid grid;
  NormalizationConfig normalization;
  SynthConfig synth;
  std::string generator_version;
};

// The item list a build would produce, without touching the filesystem.
// Rooms enumerate lengths x widths x heights (lengths slowest), each
// repeated rirs_per_room times.
std::vector<CorpusItem> enumerate_corpus(const CorpusGrid& grid,
                                         const NormalizationConfig& norm = {});

inline constexpr const char* kManifestName = "manifest.json";

// Writes <out_dir>/rirs/<id>.wav + sidecars and <out_dir>/manifest.json.
// Items whose files already exist with a matching sidecar are skipped.
CorpusManifest build_corpus(const CorpusGrid& grid, const SynthConfig& cfg,
                            const std::filesystem::path& out_dir,
                            const NormalizationConfig& norm = {});

nlohmann::json manifest_to_json(const CorpusManifest& m);
CorpusManifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const std::filesystem::path& path, const CorpusManifest& m);
CorpusManifest load_manifest(const std::filesystem::path& path);

// Reads every RIR of a manifest (paths relative to `base_dir`).
std::vector<Rir> load_corpus_rirs(const CorpusManifest& m,
                                  const std::filesystem::path& base_dir);
std::vector<nn::TrainingExample> training_examples(
    const CorpusManifest& m, std::span<const Rir> rirs);

// --- Runtime benchmark ---

struct RirGenerator {
  std::string name;
  bool neural = false;  // subject to the batch-size monotonicity check
  std::function<std::vector<Rir>(std::span<const AcousticEnv>, int batch_size)>
      generate;
};

struct BenchmarkRow {
  std::string generator;
  int batch_size = 1;
  size_t n_rirs = 0;
  double total_seconds = 0.0;  // median over repetitions
  double per_rir_seconds = 0.0;
  double spread = 0.0;  // (max - min) / median over repetitions
  std::vector<double> repetitions;
  bool ok = true;
  std::string error;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  std::string cpu_model;
  int threads = 1;
  // Per-RIR time non-increasing in batch size for every neural generator.
  bool neural_monotone = true;

  std::string csv() const;
  std::string table() const;
};

BenchmarkReport benchmark_runtime(std::span<const RirGenerator> generators,
                                  std::span<const AcousticEnv> envs,
                                  std::span<const int> batch_sizes,
                                  int repetitions = 3);

std::string cpu_model_name();

}  // namespace fastrir

#endif  // FASTRIR_DATASET_H_
