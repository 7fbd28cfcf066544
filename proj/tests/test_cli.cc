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

#include <gtest/gtest.h>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fastrir/cli.h"
#include "fastrir/dataset.h"
#include "fastrir/io.h"
#include "fastrir/nn/checkpoint.h"
#include "fastrir/nn/gan.h"
#include "fixtures.h"
#include "json.hpp"

namespace fastrir {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fastrir");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  ::testing::internal::CaptureStdout();
  ::testing::internal::CaptureStderr();
  const int code = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cout.flush();
  std::cerr.flush();
  Result r{code, ::testing::internal::GetCapturedStdout(),
           ::testing::internal::GetCapturedStderr()};
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// One shared untrained default-size checkpoint.
const fs::path& default_ckpt() {
  static TempDir dir;
  static const fs::path path = [] {
    const fs::path p = dir / "default.ckpt";
    nn::GanModel<float> model(nn::GanTopology::full_size(), 3);
    nn::save_checkpoint(p, model, 16000);
    return p;
  }();
  return path;
}

std::vector<std::string> small_corpus_args(const fs::path& out) {
  return {"--seed", "4", "gen-corpus", "--out", out.string(),
          "--lengths", "1:5:5", "--widths", "1:4:4", "--heights", "1:3:3",
          "--per-room", "4", "--length", "2048"};
}

TEST(Cli, VersionHandshake) {
  const Result r = run_cli({"version"});
  EXPECT_EQ(r.code, cli::kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("name"), "fastrir");
  EXPECT_EQ(j.at("interface"), 1);
  EXPECT_TRUE(j.at("version").is_string());
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run_cli({"version", "--bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"no-such-command"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"eval-t60"}).code, cli::kExitUsage);  // --manifest required
  EXPECT_EQ(run_cli({"gen-corpus", "--lengths", "3:8"}).code, cli::kExitUsage);
}

TEST(Cli, RuntimeErrorsExitTwo) {
  TempDir dir;
  const Result r = run_cli({"eval-t60", "--manifest", (dir / "missing.json").string()});
  EXPECT_EQ(r.code, cli::kExitRuntime);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Cli, HelpShowsDefaults) {
  const Result r = run_cli({"gen-corpus", "--help"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("--sample-rate"), std::string::npos);
  EXPECT_NE(r.out.find("16000"), std::string::npos);
  EXPECT_NE(r.out.find("15:8:11"), std::string::npos);
  const Result top = run_cli({"--help"});
  for (const char* sub : {"gen-corpus", "train", "infer", "eval-t60", "bench",
                          "reverb", "split", "version"}) {
    EXPECT_NE(top.out.find(sub), std::string::npos) << sub;
  }
}

TEST(Cli, InferSingleWritesWavAndSidecar) {
  TempDir dir;
  const fs::path wav = dir / "one.wav";
  const Result r = run_cli({"infer", "--ckpt", default_ckpt().string(),
                            "--room", "8,6,3", "--src", "2,2,1.5", "--lst",
                            "5,4,1.5", "--t60", "0.4", "--out", wav.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const WavData w = read_wav(wav);
  EXPECT_EQ(w.samples.size(), 4096u);
  EXPECT_EQ(w.sample_rate, 16000);
  const RirRecord rec = load_rir(wav);
  EXPECT_EQ(rec.rir.provenance, Provenance::kNeural);
  EXPECT_DOUBLE_EQ(rec.env.t60, 0.4);
}

TEST(Cli, InferRejectsInvalidEnvironment) {
  TempDir dir;
  const Result r = run_cli({"infer", "--ckpt", default_ckpt().string(),
                            "--room", "8,6,3", "--src", "9,2,1.5", "--lst",
                            "5,4,1.5", "--t60", "0.4", "--out",
                            (dir / "x.wav").string()});
  EXPECT_NE(r.code, cli::kExitOk);
  EXPECT_NE(r.err.find("source"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "x.wav"));
}

TEST(Cli, InferBatchFromJson) {
  TempDir dir;
  const fs::path envs = dir / "envs.json";
  std::ofstream(envs) << R"([
    {"room": [8, 6, 3], "source": [2, 2, 1.5], "listener": [5, 4, 1.5], "t60": 0.3},
    {"room": [10, 7, 3], "source": [1, 1, 1], "listener": [8, 5, 2], "t60": 0.6}
  ])";
  const Result r = run_cli({"infer", "--ckpt", default_ckpt().string(), "--envs",
                            envs.string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  for (const char* name : {"rir_000000.wav", "rir_000001.wav"}) {
    EXPECT_EQ(read_wav(dir / "out" / name).samples.size(), 4096u) << name;
  }
  EXPECT_DOUBLE_EQ(load_rir(dir / "out" / "rir_000001.wav").env.t60, 0.6);
}

TEST(Cli, GenCorpusIsSeeded) {
  TempDir a, b, c;
  ASSERT_EQ(run_cli(small_corpus_args(a.path())).code, cli::kExitOk);
  ASSERT_EQ(run_cli(small_corpus_args(b.path())).code, cli::kExitOk);
  auto other = small_corpus_args(c.path());
  other[1] = "5";
  ASSERT_EQ(run_cli(other).code, cli::kExitOk);
  EXPECT_EQ(slurp(a / kManifestName), slurp(b / kManifestName));
  EXPECT_NE(slurp(a / kManifestName), slurp(c / kManifestName));
  const CorpusManifest m = load_manifest(a / kManifestName);
  ASSERT_EQ(m.items.size(), 4u);
  for (const auto& item : m.items) {
    EXPECT_EQ(slurp(a.path() / item.rir_path), slurp(b.path() / item.rir_path));
  }
}

TEST(Cli, EvalT60Report) {
  TempDir dir;
  ASSERT_EQ(run_cli(small_corpus_args(dir / "corpus")).code, cli::kExitOk);
  const fs::path csv = dir / "t60.csv";
  const Result r = run_cli({"eval-t60", "--manifest",
                            (dir / "corpus" / kManifestName).string(), "--out",
                            csv.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  std::istringstream in(slurp(csv));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 1u + 8u + 2u);
  EXPECT_EQ(lines[0], "env-id,target_t60,estimated_t60,abs_error,cropped");
  EXPECT_EQ(lines[9].rfind("MEAN,,,", 0), 0u);
  EXPECT_TRUE(lines[9].ends_with(",false"));
  EXPECT_EQ(lines[10].rfind("MEAN,,,", 0), 0u);
  EXPECT_TRUE(lines[10].ends_with(",true"));
  EXPECT_LT(std::stod(lines[9].substr(7)), 0.1);
}

TEST(Cli, SplitWritesSegments) {
  TempDir dir;
  const int fs = 8000;
  std::vector<double> rec(8 * fs, 0.0);
  for (int i = 0; i < 2 * fs; ++i) rec[i] = 0.3 * std::sin(0.1 * i);
  for (int i = 6 * fs; i < 8 * fs; ++i) rec[i] = 0.3 * std::sin(0.1 * i);
  write_wav(dir / "talk.wav", rec, fs);
  const Result r = run_cli({"split", "--input", (dir / "talk.wav").string(),
                            "--out", (dir / "segs").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(slurp(dir / "segs" / "segments.csv"),
            "segment_id,start,length\ntalk_0,0,16000\ntalk_16000,16000,48000\n");
  EXPECT_EQ(read_wav(dir / "segs" / "talk_16000.wav").samples.size(), 48000u);
}

}  // namespace
}  // namespace fastrir
