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

#include "fastrir/cli.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fastrir/analysis.h"
#include "fastrir/dataset.h"
#include "fastrir/error.h"
#include "fastrir/io.h"
#include "fastrir/nn/checkpoint.h"
#include "fastrir/nn/inference.h"
#include "fastrir/nn/train.h"
#include "fastrir/parallel.h"
#include "fastrir/rir_core.h"
#include "fastrir/rng.h"
#include "fastrir/speech_sim.h"
#include "fastrir/version.h"

namespace fastrir::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutDirEnv = "FASTRIR_OUT_DIR";

fs::path default_out(const std::string& leaf) {
  const char* base = std::getenv(kOutDirEnv);
  return base && *base ? fs::path(base) / leaf : fs::path(leaf);
}

std::vector<double> parse_list(const std::string& text, const std::string& flag,
                               char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) {
    try {
      size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "cannot parse number '" + part + "'");
    }
  }
  return out;
}

Vec3 parse_vec3(const std::string& text, const std::string& flag) {
  const auto v = parse_list(text, flag, ',');
  if (v.size() != 3) throw CLI::ValidationError(flag, "expected x,y,z");
  return {v[0], v[1], v[2]};
}

AxisRange parse_axis(const std::string& text, const std::string& flag) {
  const auto v = parse_list(text, flag, ':');
  if (v.size() != 3) throw CLI::ValidationError(flag, "expected COUNT:MIN:MAX");
  return {static_cast<int>(v[0]), v[1], v[2]};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
}

T60Options t60_options(const std::string& range) {
  T60Options o;
  o.range = range == "t30" ? DecayRange::kT30 : DecayRange::kT20;
  return o;
}

struct Globals {
  uint64_t seed = 0;
  int threads = 0;
};

// --- gen-corpus ---

struct GenCorpusArgs {
  std::string out = default_out("corpus").string();
  std::string lengths = "15:8:11";
  std::string widths = "10:6:8";
  std::string heights = "5:2.5:3.5";
  int per_room = 100;
  std::string t60 = "0.2:0.7";
  double margin = 0.3;
  int sample_rate = 16000;
  int length = 4096;
  double density = 20000.0;
  double d_max = 11.0;
  double t60_max = 0.7;
};

void add_gen_corpus(CLI::App& app, GenCorpusArgs& a) {
  app.add_option("--out", a.out, "Output directory (default from $FASTRIR_OUT_DIR)");
  app.add_option("--lengths", a.lengths, "Room lengths COUNT:MIN:MAX (m)");
  app.add_option("--widths", a.widths, "Room widths COUNT:MIN:MAX (m)");
  app.add_option("--heights", a.heights, "Room heights COUNT:MIN:MAX (m)");
  app.add_option("--per-room", a.per_room, "RIRs per room size");
  app.add_option("--t60", a.t60, "T60 range MIN:MAX (s)");
  app.add_option("--margin", a.margin, "Minimum source/listener distance to walls (m)");
  app.add_option("--sample-rate", a.sample_rate, "Sample rate (Hz)");
  app.add_option("--length", a.length, "RIR length (samples)");
  app.add_option("--density", a.density, "Diffuse-tail arrival density (1/s)");
  app.add_option("--d-max", a.d_max, "Embedding distance scale (m)");
  app.add_option("--t60-max", a.t60_max, "Embedding T60 scale (s)");
}

int cmd_gen_corpus(const GenCorpusArgs& a, const Globals& g) {
  CorpusGrid grid;
  grid.lengths = parse_axis(a.lengths, "--lengths");
  grid.widths = parse_axis(a.widths, "--widths");
  grid.heights = parse_axis(a.heights, "--heights");
  grid.rirs_per_room = a.per_room;
  const auto t60 = parse_list(a.t60, "--t60", ':');
  if (t60.size() != 2) throw CLI::ValidationError("--t60", "expected MIN:MAX");
  grid.t60_lo = t60[0];
  grid.t60_hi = t60[1];
  grid.seed = g.seed;
  grid.wall_margin = a.margin;
  SynthConfig cfg;
  cfg.sample_rate = a.sample_rate;
  cfg.length = a.length;
  cfg.diffuse_density = a.density;
  cfg.seed = g.seed;
  const CorpusManifest m =
      build_corpus(grid, cfg, a.out, NormalizationConfig{a.d_max, a.t60_max});
  std::cout << "wrote " << m.items.size() << " RIRs and "
            << (fs::path(a.out) / kManifestName).string() << '\n';
  return kExitOk;
}

// --- train ---

struct TrainArgs {
  std::string manifest;
  std::string ckpt;
  std::string topology = "default";
  std::string metrics;
  nn::TrainConfig cfg;
};

void add_train(CLI::App& app, TrainArgs& a) {
  app.add_option("--manifest", a.manifest, "Corpus manifest")->required();
  app.add_option("--ckpt", a.ckpt, "Checkpoint to write")->required();
  app.add_option("--topology", a.topology, "Network size")
      ->check(CLI::IsMember({"default", "toy"}));
  app.add_option("--metrics", a.metrics, "Per-epoch metrics CSV (default <ckpt>.metrics.csv)");
  app.add_option("--epochs", a.cfg.epochs, "Training epochs");
  app.add_option("--batch", a.cfg.batch_size, "Batch size");
  app.add_option("--lr", a.cfg.learning_rate, "Initial learning rate");
  app.add_option("--decay", a.cfg.lr_decay_factor, "Learning-rate decay factor");
  app.add_option("--decay-every", a.cfg.lr_decay_every, "Epochs between decays");
  app.add_option("--lambda-mse", a.cfg.lambda_mse, "Weight of the MSE loss");
  app.add_option("--lambda-t60", a.cfg.lambda_t60, "Weight of the T60 loss");
  app.add_option("--heldout", a.cfg.heldout_fraction, "Held-out fraction");
  app.add_option("--rms-alpha", a.cfg.rms_alpha, "RMSprop smoothing constant");
  app.add_option("--rms-eps", a.cfg.rms_eps, "RMSprop epsilon");
}

int cmd_train(TrainArgs& a, const Globals& g) {
  const fs::path manifest_path = a.manifest;
  const CorpusManifest m = load_manifest(manifest_path);
  const std::vector<Rir> rirs =
      load_corpus_rirs(m, manifest_path.parent_path());
  const auto examples = training_examples(m, rirs);

  nn::GanTopology topo = a.topology == "toy" ? nn::GanTopology::toy()
                                             : nn::GanTopology::full_size();
  if (topo.rir_length != m.synth.length) {
    throw ConfigError("topology '" + a.topology + "' generates " +
                      std::to_string(topo.rir_length) +
                      " samples but the corpus has " +
                      std::to_string(m.synth.length));
  }
  nn::GanModel<float> model(topo, g.seed, m.normalization);
  a.cfg.seed = g.seed;
  a.cfg.sample_rate = m.synth.sample_rate;
  const fs::path metrics_path =
      a.metrics.empty() ? fs::path(a.ckpt + ".metrics.csv") : fs::path(a.metrics);

  std::vector<nn::EpochMetrics> history;
  auto on_epoch = [&](const nn::EpochMetrics& e) {
    history.push_back(e);
    save_checkpoint(a.ckpt, model, m.synth.sample_rate);
    write_text(metrics_path, nn::metrics_csv(history));
    std::cout << "epoch " << e.epoch << " lr " << e.lr << " L_G " << e.loss_g
              << " L_D " << e.loss_d << " heldout_mse " << e.heldout_mse
              << " heldout_t60_error " << e.heldout_t60_error << std::endl;
  };
  try {
    nn::train(model, examples, a.cfg, on_epoch);
  } catch (const DivergenceError& e) {
    save_checkpoint(a.ckpt, model, m.synth.sample_rate);
    std::cerr << "training diverged (" << e.what()
              << "); last good model kept in " << a.ckpt << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

// --- infer ---

struct InferArgs {
  std::string ckpt;
  std::string room, src, lst;
  double t60 = 0.0;
  std::string envs;
  std::string out;
  int batch = 64;
};

void add_infer(CLI::App& app, InferArgs& a) {
  app.add_option("--ckpt", a.ckpt, "Trained checkpoint")->required();
  app.add_option("--room", a.room, "Room dimensions L,W,H (m)");
  app.add_option("--src", a.src, "Source position x,y,z (m)");
  app.add_option("--lst", a.lst, "Listener position x,y,z (m)");
  app.add_option("--t60", a.t60, "Reverberation time (s)");
  app.add_option("--envs", a.envs, "JSON array of environments (batch mode)");
  app.add_option("--out", a.out,
                 "Output WAV, or directory with --envs (default rir.wav / rirs "
                 "under $FASTRIR_OUT_DIR)");
  app.add_option("--batch", a.batch, "Inference batch size");
}

int cmd_infer(const InferArgs& a, const Globals& g) {
  nn::LoadedModel loaded = nn::load_checkpoint(a.ckpt);
  std::vector<AcousticEnv> envs;
  const bool batch_mode = !a.envs.empty();
  if (batch_mode) {
    std::ifstream f(a.envs);
    if (!f) throw IoError("cannot open " + a.envs);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(a.envs + ": " + e.what());
    }
    for (const auto& e : j) envs.push_back(env_from_json(e));
  } else {
    if (a.room.empty() || a.src.empty() || a.lst.empty()) {
      throw CLI::ValidationError("infer", "--room, --src, --lst and --t60 are required without --envs");
    }
    AcousticEnv env;
    env.room_dims = parse_vec3(a.room, "--room");
    env.source_pos = parse_vec3(a.src, "--src");
    env.listener_pos = parse_vec3(a.lst, "--lst");
    env.t60 = a.t60;
    envs.push_back(env);
  }
  const auto rirs =
      nn::generate_neural(*loaded.model, envs, loaded.sample_rate, a.batch);
  if (batch_mode) {
    const fs::path dir = a.out.empty() ? default_out("rirs") : fs::path(a.out);
    fs::create_directories(dir);
    for (size_t i = 0; i < rirs.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "rir_%06zu.wav", i);
      save_rir(dir / name, {rirs[i], envs[i], g.seed});
    }
    std::cout << "wrote " << rirs.size() << " RIRs to " << dir.string() << '\n';
  } else {
    const fs::path out = a.out.empty() ? default_out("rir.wav") : fs::path(a.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    save_rir(out, {rirs[0], envs[0], g.seed});
    std::cout << "wrote " << out.string() << '\n';
  }
  return kExitOk;
}

// --- eval-t60 ---

struct EvalArgs {
  std::string manifest;
  std::string ckpt;
  std::string out;
  double threshold = kCropThreshold;
  std::string range = "t20";
  int batch = 64;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  app.add_option("--manifest", a.manifest, "Corpus manifest")->required();
  app.add_option("--ckpt", a.ckpt,
                 "Checkpoint to evaluate (default: the manifest's reference RIRs)");
  app.add_option("--out", a.out, "CSV report (default stdout)");
  app.add_option("--threshold", a.threshold, "Crop RIRs whose target T60 is below this (s)");
  app.add_option("--range", a.range, "Decay range for the fit")
      ->check(CLI::IsMember({"t20", "t30"}));
  app.add_option("--batch", a.batch, "Inference batch size");
}

int cmd_eval(const EvalArgs& a, const Globals&) {
  const fs::path manifest_path = a.manifest;
  const CorpusManifest m = load_manifest(manifest_path);
  std::vector<AcousticEnv> envs;
  std::vector<double> targets;
  for (const auto& item : m.items) {
    envs.push_back(item.env);
    targets.push_back(item.env.t60);
  }
  std::vector<Rir> rirs;
  if (a.ckpt.empty()) {
    rirs = load_corpus_rirs(m, manifest_path.parent_path());
  } else {
    nn::LoadedModel loaded = nn::load_checkpoint(a.ckpt);
    rirs = nn::generate_neural(*loaded.model, envs, loaded.sample_rate, a.batch);
  }
  std::vector<Rir> cropped;
  for (size_t i = 0; i < rirs.size(); ++i) {
    cropped.push_back(crop_at_t60(rirs[i], targets[i], a.threshold));
  }
  const T60Options opts = t60_options(a.range);
  const T60ErrorReport plain = t60_error(rirs, targets, opts);
  const T60ErrorReport crop = t60_error(cropped, targets, opts);

  std::ostringstream os;
  os.precision(9);
  os << "env-id,target_t60,estimated_t60,abs_error,cropped\n";
  for (int pass = 0; pass < 2; ++pass) {
    const T60ErrorReport& rep = pass ? crop : plain;
    for (size_t i = 0; i < rirs.size(); ++i) {
      os << m.items[i].id << ',' << targets[i] << ',' << rep.estimates[i] << ','
         << std::abs(rep.estimates[i] - targets[i]) << ','
         << (pass ? "true" : "false") << '\n';
    }
  }
  os << "MEAN,,," << plain.mean_abs_error << ",false\n";
  os << "MEAN,,," << crop.mean_abs_error << ",true\n";
  if (a.out.empty()) {
    std::cout << os.str();
  } else {
    write_text(a.out, os.str());
  }
  std::cerr << "mean |T60 error|: " << plain.mean_abs_error << " s uncropped, "
            << crop.mean_abs_error << " s cropped (" << plain.used << "/"
            << rirs.size() << " estimated)\n";
  return kExitOk;
}

// --- bench ---

struct BenchArgs {
  int n = 1000;
  std::string batches = "1,64";
  std::string ckpt;
  int reps = 3;
  std::string out;
};

void add_bench(CLI::App& app, BenchArgs& a) {
  app.add_option("--n", a.n, "RIRs per run");
  app.add_option("--batch", a.batches, "Comma-separated neural batch sizes");
  app.add_option("--ckpt", a.ckpt, "Checkpoint (default: untrained full-size model)");
  app.add_option("--reps", a.reps, "Timed repetitions (median reported)");
  app.add_option("--out", a.out, "CSV report");
}

int cmd_bench(const BenchArgs& a, const Globals& g) {
  if (a.n < 1) throw CLI::ValidationError("--n", "must be >= 1");
  std::vector<int> batches;
  for (double b : parse_list(a.batches, "--batch", ',')) {
    batches.push_back(static_cast<int>(b));
  }
  std::unique_ptr<nn::GanModel<float>> model;
  int sample_rate = 16000;
  if (a.ckpt.empty()) {
    model = std::make_unique<nn::GanModel<float>>(nn::GanTopology::full_size(), g.seed);
  } else {
    nn::LoadedModel loaded = nn::load_checkpoint(a.ckpt);
    model = std::move(loaded.model);
    sample_rate = loaded.sample_rate;
  }
  SynthConfig ref_cfg;
  ref_cfg.sample_rate = sample_rate;
  ref_cfg.length = model->topology.rir_length;
  ref_cfg.seed = g.seed;

  // Default corpus grid ranges, clipped to what the model can represent.
  const CorpusGrid grid;
  const NormalizationConfig& norm = model->normalization;
  auto clip = [&](double v) { return std::min(v, norm.d_max); };
  const double t60_hi = std::min(grid.t60_hi, norm.t60_max);
  const double t60_lo = std::min(grid.t60_lo, t60_hi);
  std::vector<AcousticEnv> envs;
  Rng rng(g.seed);
  for (int i = 0; i < a.n; ++i) {
    const Vec3 room{rng.uniform(clip(grid.lengths.lo), clip(grid.lengths.hi)),
                    rng.uniform(clip(grid.widths.lo), clip(grid.widths.hi)),
                    rng.uniform(clip(grid.heights.lo), clip(grid.heights.hi))};
    envs.push_back(sample_environment(derive_seed(g.seed, i), room, t60_lo,
                                      t60_hi, grid.wall_margin));
  }
  const std::vector<RirGenerator> gens = {
      {"reference", false,
       [&](std::span<const AcousticEnv> e, int) {
         return generate_reference_batch(e, ref_cfg);
       }},
      {"neural", true,
       [&](std::span<const AcousticEnv> e, int b) {
         return nn::generate_neural(*model, e, sample_rate, b);
       }}};
  // The reference generator does not batch; time it once.
  const int ref_batch[] = {1};
  BenchmarkReport report =
      benchmark_runtime(std::span(gens).first(1), envs, ref_batch, a.reps);
  const BenchmarkReport neural =
      benchmark_runtime(std::span(gens).subspan(1), envs, batches, a.reps);
  report.rows.insert(report.rows.end(), neural.rows.begin(), neural.rows.end());
  report.neural_monotone = neural.neural_monotone;

  std::cout << report.table();
  if (!a.out.empty()) write_text(a.out, report.csv());
  std::cout << "neural per-RIR time non-increasing in batch size: "
            << (report.neural_monotone ? "yes" : "NO") << '\n';
  const bool all_ok = std::all_of(report.rows.begin(), report.rows.end(),
                                  [](const BenchmarkRow& r) { return r.ok; });
  return report.neural_monotone && all_ok ? kExitOk : kExitRuntime;
}

// --- reverb / split ---

struct SilenceArgs {
  double min_silence = 3.0;
  double threshold = -40.0;
  double frame = 0.01;

  SilenceConfig config() const { return {threshold, frame, min_silence}; }
};

void add_silence(CLI::App& app, SilenceArgs& a) {
  app.add_option("--min-silence", a.min_silence, "Minimum silence run that triggers a split (s)");
  app.add_option("--threshold", a.threshold, "Silence threshold (dBFS, frame RMS)");
  app.add_option("--frame", a.frame, "Analysis frame length (s)");
}

SpeechSegment load_recording(const fs::path& path) {
  const WavData wav = read_wav(path);
  SpeechSegment s;
  s.samples = wav.samples;
  s.sample_rate = wav.sample_rate;
  s.source_id = path.stem().string();
  return s;
}

struct ReverbArgs {
  std::string manifest;
  std::vector<std::string> inputs;
  std::string out = default_out("reverb").string();
  bool split = false;
  SilenceArgs silence;
};

void add_reverb(CLI::App& app, ReverbArgs& a) {
  app.add_option("--manifest", a.manifest, "RIR corpus manifest")->required();
  app.add_option("--inputs", a.inputs, "Clean speech WAV files")->required();
  app.add_option("--out", a.out, "Output directory (default from $FASTRIR_OUT_DIR)");
  app.add_flag("--split", a.split, "Split recordings on silence before reverberating");
  add_silence(app, a.silence);
}

int cmd_reverb(const ReverbArgs& a, const Globals& g) {
  const fs::path manifest_path = a.manifest;
  const CorpusManifest m = load_manifest(manifest_path);
  std::vector<SpeechSegment> segments;
  for (const auto& in : a.inputs) {
    SpeechSegment rec = load_recording(in);
    if (a.split) {
      for (auto& s : split_on_silence(rec, a.silence.config())) {
        segments.push_back(std::move(s));
      }
    } else {
      segments.push_back(std::move(rec));
    }
  }
  const ReverbReport report = reverberate_corpus(
      segments, m, manifest_path.parent_path(), a.out, g.seed);
  write_text(fs::path(a.out) / "pairs.csv", report.csv());
  std::cout << "reverberated " << report.pairs.size() << " segments into "
            << a.out << '\n';
  for (const auto& [seg, err] : report.failures) {
    std::cerr << "failed: " << seg << ": " << err << '\n';
  }
  return report.failures.empty() ? kExitOk : kExitRuntime;
}

struct SplitArgs {
  std::string input;
  std::string out = default_out("segments").string();
  SilenceArgs silence;
};

void add_split(CLI::App& app, SplitArgs& a) {
  app.add_option("--input", a.input, "Recording WAV")->required();
  app.add_option("--out", a.out, "Output directory (default from $FASTRIR_OUT_DIR)");
  add_silence(app, a.silence);
}

int cmd_split(const SplitArgs& a, const Globals&) {
  const SpeechSegment rec = load_recording(a.input);
  const auto segments = split_on_silence(rec, a.silence.config());
  fs::create_directories(a.out);
  std::ostringstream csv;
  csv << "segment_id,start,length\n";
  for (const auto& s : segments) {
    write_wav(fs::path(a.out) / (segment_id(s) + ".wav"), s.samples, s.sample_rate);
    csv << segment_id(s) << ',' << s.start_offset << ',' << s.samples.size() << '\n';
  }
  write_text(fs::path(a.out) / "segments.csv", csv.str());
  std::cout << "wrote " << segments.size() << " segments to " << a.out << '\n';
  return kExitOk;
}

int cmd_version() {
  const nlohmann::json j = {{"name", "fastrir"},
                            {"version", kVersion},
                            {"interface", kInterfaceVersion}};
  std::cout << j.dump() << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Fast room impulse response generation toolkit", "fastrir"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML file with default flag values");

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--threads", g.threads, "Worker thread cap (0 = all cores)");

  GenCorpusArgs gen_args;
  TrainArgs train_args;
  InferArgs infer_args;
  EvalArgs eval_args;
  BenchArgs bench_args;
  ReverbArgs reverb_args;
  SplitArgs split_args;
  auto* gen = app.add_subcommand("gen-corpus", "Build a reference RIR corpus on the room grid");
  auto* tr = app.add_subcommand("train", "Train the generator on a corpus");
  auto* inf = app.add_subcommand("infer", "Generate RIRs from a checkpoint");
  auto* ev = app.add_subcommand("eval-t60", "T60 error report, cropped and uncropped");
  auto* be = app.add_subcommand("bench", "Runtime of reference vs neural generation");
  auto* rv = app.add_subcommand("reverb", "Reverberate speech with corpus RIRs");
  auto* sp = app.add_subcommand("split", "Split a recording on long silences");
  auto* ver = app.add_subcommand("version", "Print name, version and interface version as JSON");
  add_gen_corpus(*gen, gen_args);
  add_train(*tr, train_args);
  add_infer(*inf, infer_args);
  add_eval(*ev, eval_args);
  add_bench(*be, bench_args);
  add_reverb(*rv, reverb_args);
  add_split(*sp, split_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    set_thread_limit(g.threads);
    if (*gen) return cmd_gen_corpus(gen_args, g);
    if (*tr) return cmd_train(train_args, g);
    if (*inf) return cmd_infer(infer_args, g);
    if (*ev) return cmd_eval(eval_args, g);
    if (*be) return cmd_bench(bench_args, g);
    if (*rv) return cmd_reverb(reverb_args, g);
    if (*sp) return cmd_split(split_args, g);
    if (*ver) return cmd_version();
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace fastrir::cli
