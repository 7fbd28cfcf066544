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

#include "fastrir/io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "fastrir/error.h"
#include "json.hpp"

namespace fastrir {

namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV and checkpoint I/O assume a little-endian host");

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T read_le(const std::vector<char>& buf, size_t off) {
  T v;
  std::memcpy(&v, buf.data() + off, sizeof(T));
  return v;
}

template <typename T>
void put(std::string& out, T v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
  const std::vector<char> buf = slurp(path);
  const std::string name = path.string();
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw IoError(name + ": not a RIFF/WAVE file");
  }
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  size_t off = 12;
  while (off + 8 <= buf.size()) {
    const std::string id(buf.data() + off, 4);
    const uint32_t size = read_le<uint32_t>(buf, off + 4);
    const size_t body = off + 8;
    if (body + size > buf.size()) throw IoError(name + ": truncated chunk " + id);
    if (id == "fmt ") {
      if (size < 16) throw IoError(name + ": short fmt chunk");
      format = read_le<uint16_t>(buf, body);
      channels = read_le<uint16_t>(buf, body + 2);
      rate = read_le<uint32_t>(buf, body + 4);
      bits = read_le<uint16_t>(buf, body + 14);
      if (format == kFormatExtensible && size >= 26) {
        format = read_le<uint16_t>(buf, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw IoError(name + ": data chunk before fmt chunk");
      if (channels != 1) {
        throw IoError(name + ": expected mono, got " + std::to_string(channels) +
                      " channels");
      }
      WavData out;
      out.sample_rate = static_cast<int>(rate);
      if (format == kFormatPcm && bits == 16) {
        out.samples.resize(size / 2);
        for (size_t i = 0; i < out.samples.size(); ++i) {
          out.samples[i] = read_le<int16_t>(buf, body + 2 * i) / 32768.0;
        }
      } else if (format == kFormatFloat && bits == 32) {
        out.samples.resize(size / 4);
        for (size_t i = 0; i < out.samples.size(); ++i) {
          out.samples[i] = read_le<float>(buf, body + 4 * i);
        }
      } else {
        throw IoError(name + ": unsupported sample format " +
                      std::to_string(format) + "/" + std::to_string(bits) +
                      " bit");
      }
      return out;
    }
    off = body + size + (size & 1);
  }
  throw IoError(name + ": no data chunk");
}

void write_wav(const std::filesystem::path& path,
               std::span<const double> samples, int sample_rate) {
  const uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 4);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put<uint32_t>(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put<uint32_t>(out, 16);
  put<uint16_t>(out, kFormatFloat);
  put<uint16_t>(out, 1);
  put<uint32_t>(out, static_cast<uint32_t>(sample_rate));
  put<uint32_t>(out, static_cast<uint32_t>(sample_rate) * 4);
  put<uint16_t>(out, 4);
  put<uint16_t>(out, 32);
  out += "data";
  put<uint32_t>(out, data_bytes);
  for (double s : samples) put<float>(out, static_cast<float>(s));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

std::filesystem::path sidecar_path(const std::filesystem::path& wav_path) {
  std::filesystem::path p = wav_path;
  return p.replace_extension(".json");
}

void save_rir(const std::filesystem::path& wav_path, const RirRecord& record) {
  write_wav(wav_path, record.rir.samples, record.rir.sample_rate);
  const nlohmann::json meta = {
      {"env", env_to_json(record.env)},
      {"provenance", to_string(record.rir.provenance)},
      {"seed", record.seed},
      {"sample_rate", record.rir.sample_rate},
      {"length", record.rir.length()}};
  std::ofstream f(sidecar_path(wav_path), std::ios::trunc);
  if (!f) throw IoError("cannot write " + sidecar_path(wav_path).string());
  f << meta.dump(2) << '\n';
}

RirRecord load_rir(const std::filesystem::path& wav_path) {
  RirRecord rec;
  const WavData wav = read_wav(wav_path);
  rec.rir.samples = wav.samples;
  rec.rir.sample_rate = wav.sample_rate;
  const std::filesystem::path side = sidecar_path(wav_path);
  std::ifstream f(side);
  if (!f) throw IoError("missing sidecar " + side.string());
  try {
    const nlohmann::json meta = nlohmann::json::parse(f);
    rec.env = env_from_json(meta.at("env"));
    rec.rir.provenance = provenance_from_string(meta.at("provenance"));
    rec.seed = meta.at("seed").get<uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(side.string() + ": " + e.what());
  }
  return rec;
}

}  // namespace fastrir
