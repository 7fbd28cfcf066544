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

#include "fastrir/dataset.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "fastrir/error.h"
#include "fastrir/io.h"
#include "fastrir/parallel.h"
#include "fastrir/rir_core.h"
#include "fastrir/rng.h"
#include "fastrir/version.h"

namespace fastrir {

namespace fs = std::filesystem;

std::vector<double> AxisRange::values() const {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) {
    v[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  }
  return v;
}

namespace {

void validate_axis(const AxisRange& a, const std::string& name) {
  if (a.count < 1) throw RangeError(name, "count must be >= 1");
  if (!(a.lo > 0.0)) throw RangeError(name, "lower bound must be > 0");
  if (a.count > 1 && !(a.lo < a.hi)) {
    throw RangeError(name, "range needs min < max");
  }
}

std::string item_id(size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rir_%06zu", index);
  return buf;
}

nlohmann::json axis_json(const AxisRange& a) {
  return {{"count", a.count}, {"min", a.lo}, {"max", a.hi}};
}

AxisRange axis_from(const nlohmann::json& j) {
  return {j.at("count").get<int>(), j.at("min").get<double>(),
          j.at("max").get<double>()};
}

nlohmann::json synth_json(const SynthConfig& c) {
  nlohmann::json j = {{"speed_of_sound", c.speed_of_sound},
                      {"sample_rate", c.sample_rate},
                      {"length", c.length},
                      {"energy_floor_db", c.energy_floor_db},
                      {"diffuse_density", c.diffuse_density},
                      {"seed", c.seed}};
  j["max_image_order"] =
      c.max_image_order ? nlohmann::json(*c.max_image_order) : nlohmann::json();
  j["mixing_time_ms"] =
      c.mixing_time_ms ? nlohmann::json(*c.mixing_time_ms) : nlohmann::json();
  return j;
}

SynthConfig synth_from(const nlohmann::json& j) {
  SynthConfig c;
  c.speed_of_sound = j.at("speed_of_sound");
  c.sample_rate = j.at("sample_rate");
  c.length = j.at("length");
  c.energy_floor_db = j.at("energy_floor_db");
  c.diffuse_density = j.at("diffuse_density");
  c.seed = j.at("seed");
  if (!j.at("max_image_order").is_null()) c.max_image_order = j["max_image_order"];
  if (!j.at("mixing_time_ms").is_null()) c.mixing_time_ms = j["mixing_time_ms"];
  return c;
}

// True when a previous build already wrote this item.
bool item_complete(const fs::path& wav, const CorpusItem& item, int length) {
  if (!fs::exists(wav) || !fs::exists(sidecar_path(wav))) return false;
  try {
    const RirRecord rec = load_rir(wav);
    return rec.env == item.env && rec.seed == item.seed &&
           static_cast<int>(rec.rir.length()) == length;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

void CorpusGrid::validate() const {
  validate_axis(lengths, "grid.lengths");
  validate_axis(widths, "grid.widths");
  validate_axis(heights, "grid.heights");
  if (rirs_per_room < 1) throw RangeError("grid.rirs_per_room", "must be >= 1");
  if (!(t60_lo > 0.0 && t60_lo < t60_hi)) {
    throw RangeError("grid.t60", "range needs 0 < min < max");
  }
  if (!(wall_margin >= 0.0)) throw RangeError("grid.wall_margin", "must be >= 0");
}

size_t CorpusGrid::total() const {
  return static_cast<size_t>(lengths.count) * widths.count * heights.count *
         rirs_per_room;
}

std::vector<CorpusItem> enumerate_corpus(const CorpusGrid& grid,
                                         const NormalizationConfig& norm) {
  grid.validate();
  validate(norm);
  std::vector<CorpusItem> items(grid.total());
  const auto ls = grid.lengths.values();
  const auto ws = grid.widths.values();
  const auto hs = grid.heights.values();
  const size_t per_room = grid.rirs_per_room;
  parallel_for(static_cast<long>(items.size()), [&](long i) {
    const size_t room = i / per_room;
    const size_t h = room % hs.size();
    const size_t w = (room / hs.size()) % ws.size();
    const size_t l = room / (hs.size() * ws.size());
    CorpusItem& item = items[i];
    item.id = item_id(i);
    item.seed = derive_seed(grid.seed, i);
    item.env = sample_environment(item.seed, {ls[l], ws[w], hs[h]}, grid.t60_lo,
                                  grid.t60_hi, grid.wall_margin);
    item.embedding = build_embedding(item.env, norm);
    item.rir_path = "rirs/" + item.id + ".wav";
  });
  return items;
}

CorpusManifest build_corpus(const CorpusGrid& grid, const SynthConfig& cfg,
                            const fs::path& out_dir,
                            const NormalizationConfig& norm) {
  validate(cfg);
  CorpusManifest m;
  m.grid = grid;
  m.normalization = norm;
  m.synth = cfg;
  m.generator_version = kVersion;
  m.items = enumerate_corpus(grid, norm);

  std::error_code ec;
  fs::create_directories(out_dir / "rirs", ec);
  if (ec) throw IoError("cannot create " + (out_dir / "rirs").string());

  std::mutex failures_mu;
  std::vector<std::pair<std::string, std::string>> failures;
  parallel_for(static_cast<long>(m.items.size()), [&](long i) {
    const CorpusItem& item = m.items[i];
    const fs::path wav = out_dir / item.rir_path;
    try {
      if (item_complete(wav, item, cfg.length)) return;
      SynthConfig item_cfg = cfg;
      item_cfg.seed = derive_seed(item.seed, 1);
      save_rir(wav, {generate_reference_rir(item.env, item_cfg), item.env,
                     item.seed});
    } catch (const std::exception& e) {
      std::lock_guard lock(failures_mu);
      failures.emplace_back(item.id, e.what());
    }
  });
  size_t missing = 0;
  for (const auto& item : m.items) {
    if (!fs::exists(out_dir / item.rir_path)) ++missing;
  }
  if (!failures.empty() || missing > 0) {
    std::sort(failures.begin(), failures.end());
    std::string msg = "corpus build incomplete: " + std::to_string(missing) +
                      " missing, " + std::to_string(failures.size()) + " failed";
    if (!failures.empty()) {
      msg += " (first: " + failures[0].first + ": " + failures[0].second + ")";
    }
    throw IoError(msg);
  }
  save_manifest(out_dir / kManifestName, m);
  return m;
}

nlohmann::json manifest_to_json(const CorpusManifest& m) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : m.items) {
    items.push_back({{"id", it.id},
                     {"env", env_to_json(it.env)},
                     {"embedding", it.embedding.values},
                     {"rir_path", it.rir_path},
                     {"seed", it.seed}});
  }
  return {{"generator_version", m.generator_version},
          {"grid",
           {{"lengths", axis_json(m.grid.lengths)},
            {"widths", axis_json(m.grid.widths)},
            {"heights", axis_json(m.grid.heights)},
            {"rirs_per_room", m.grid.rirs_per_room},
            {"t60_range", {m.grid.t60_lo, m.grid.t60_hi}},
            {"seed", m.grid.seed},
            {"wall_margin", m.grid.wall_margin}}},
          {"normalization",
           {{"d_max", m.normalization.d_max},
            {"t60_max", m.normalization.t60_max}}},
          {"synth", synth_json(m.synth)},
          {"items", items}};
}

CorpusManifest manifest_from_json(const nlohmann::json& j) {
  CorpusManifest m;
  try {
    m.generator_version = j.at("generator_version");
    const auto& g = j.at("grid");
    m.grid.lengths = axis_from(g.at("lengths"));
    m.grid.widths = axis_from(g.at("widths"));
    m.grid.heights = axis_from(g.at("heights"));
    m.grid.rirs_per_room = g.at("rirs_per_room");
    m.grid.t60_lo = g.at("t60_range").at(0);
    m.grid.t60_hi = g.at("t60_range").at(1);
    m.grid.seed = g.at("seed");
    m.grid.wall_margin = g.at("wall_margin");
    m.normalization.d_max = j.at("normalization").at("d_max");
    m.normalization.t60_max = j.at("normalization").at("t60_max");
    m.synth = synth_from(j.at("synth"));
    for (const auto& it : j.at("items")) {
      CorpusItem item;
      item.id = it.at("id");
      item.env = env_from_json(it.at("env"));
      item.embedding.values = it.at("embedding");
      item.rir_path = it.at("rir_path");
      item.seed = it.at("seed");
      m.items.push_back(std::move(item));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed manifest: ") + e.what());
  }
  validate(m.normalization);
  for (const auto& item : m.items) {
    const EmbeddingVec expect = build_embedding(item.env, m.normalization);
    for (int i = 0; i < kEmbeddingSize; ++i) {
      if (std::abs(expect[i] - item.embedding[i]) > 1e-9) {
        throw IoError("manifest item " + item.id +
                      ": embedding does not match its environment");
      }
    }
  }
  return m;
}

void save_manifest(const fs::path& path, const CorpusManifest& m) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << manifest_to_json(m).dump(1) << '\n';
  if (!f) throw IoError("write failed for " + path.string());
}

CorpusManifest load_manifest(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

std::vector<Rir> load_corpus_rirs(const CorpusManifest& m,
                                  const fs::path& base_dir) {
  std::vector<Rir> rirs(m.items.size());
  parallel_for(static_cast<long>(rirs.size()), [&](long i) {
    rirs[i] = load_rir(base_dir / m.items[i].rir_path).rir;
  });
  return rirs;
}

std::vector<nn::TrainingExample> training_examples(const CorpusManifest& m,
                                                   std::span<const Rir> rirs) {
  if (rirs.size() != m.items.size()) {
    throw ConfigError("RIR count does not match manifest");
  }
  std::vector<nn::TrainingExample> out(rirs.size());
  for (size_t i = 0; i < rirs.size(); ++i) {
    out[i].embedding = m.items[i].embedding;
    out[i].rir.assign(rirs[i].samples.begin(), rirs[i].samples.end());
    out[i].t60 = m.items[i].env.t60;
  }
  return out;
}

std::string cpu_model_name() {
  std::ifstream f("/proc/cpuinfo");
  std::string line;
  while (std::getline(f, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) return line.substr(colon + 2);
    }
  }
  return "unknown";
}

BenchmarkReport benchmark_runtime(std::span<const RirGenerator> generators,
                                  std::span<const AcousticEnv> envs,
                                  std::span<const int> batch_sizes,
                                  int repetitions) {
  if (envs.empty()) throw ConfigError("benchmark needs at least one environment");
  if (repetitions < 1) throw ConfigError("benchmark repetitions must be >= 1");
  for (int b : batch_sizes) {
    if (b < 1) throw ConfigError("batch sizes must be >= 1");
  }
  BenchmarkReport report;
  report.cpu_model = cpu_model_name();
  report.threads = max_threads();
  using clock = std::chrono::steady_clock;

  for (const RirGenerator& gen : generators) {
    for (int b : batch_sizes) {
      BenchmarkRow row;
      row.generator = gen.name;
      row.batch_size = b;
      row.n_rirs = envs.size();
      try {
        gen.generate(envs.first(std::min<size_t>(envs.size(), b)), b);
        for (int r = 0; r < repetitions; ++r) {
          const auto t0 = clock::now();
          const auto out = gen.generate(envs, b);
          row.repetitions.push_back(
              std::chrono::duration<double>(clock::now() - t0).count());
          if (out.size() != envs.size()) {
            throw Error("generator returned " + std::to_string(out.size()) +
                        " RIRs for " + std::to_string(envs.size()) + " inputs");
          }
        }
        std::vector<double> sorted = row.repetitions;
        std::sort(sorted.begin(), sorted.end());
        row.total_seconds = sorted[sorted.size() / 2];
        row.per_rir_seconds = row.total_seconds / envs.size();
        row.spread = (sorted.back() - sorted.front()) / row.total_seconds;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      report.rows.push_back(row);
    }
    if (!gen.neural) continue;
    // Monotonicity over the successful rows, in increasing batch size.
    std::vector<BenchmarkRow> rows;
    for (auto it = report.rows.end() - batch_sizes.size(); it != report.rows.end();
         ++it) {
      if (it->ok) rows.push_back(*it);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return a.batch_size < b.batch_size;
    });
    for (size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].per_rir_seconds > rows[i - 1].per_rir_seconds) {
        report.neural_monotone = false;
      }
    }
  }
  return report;
}

std::string BenchmarkReport::csv() const {
  std::ostringstream os;
  os.precision(9);
  os << "generator,batch_size,n_rirs,total_seconds,per_rir_seconds,spread,ok,"
        "error,cpu_model,threads\n";
  for (const auto& r : rows) {
    os << r.generator << ',' << r.batch_size << ',' << r.n_rirs << ','
       << r.total_seconds << ',' << r.per_rir_seconds << ',' << r.spread << ','
       << (r.ok ? "true" : "false") << ",\"" << r.error << "\",\"" << cpu_model
       << "\"," << threads << '\n';
  }
  return os.str();
}

std::string BenchmarkReport::table() const {
  std::ostringstream os;
  char line[256];
  os << "CPU: " << cpu_model << "  threads: " << threads << '\n';
  std::snprintf(line, sizeof(line), "%-16s %6s %7s %12s %14s %8s\n",
                "generator", "batch", "n", "total (s)", "per RIR (s)", "spread");
  os << line;
  for (const auto& r : rows) {
    if (!r.ok) {
      os << r.generator << " batch " << r.batch_size << ": failed: " << r.error
         << '\n';
      continue;
    }
    std::snprintf(line, sizeof(line), "%-16s %6d %7zu %12.4f %14.3e %7.1f%%\n",
                  r.generator.c_str(), r.batch_size, r.n_rirs, r.total_seconds,
                  r.per_rir_seconds, 100.0 * r.spread);
    os << line;
  }
  return os.str();
}

}  // namespace fastrir
