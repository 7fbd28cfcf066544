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

#include "fastrir/nn/checkpoint.h"

#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include "fastrir/error.h"

namespace fastrir::nn {

namespace {

constexpr char kMagic[8] = {'F', 'A', 'S', 'T', 'R', 'I', 'R', '\0'};

void put_u32(std::string& out, uint32_t v) {
  out.append(reinterpret_cast<const char*>(&v), 4);
}

class Reader {
 public:
  Reader(std::vector<char> buf, std::string name)
      : buf_(std::move(buf)), name_(std::move(name)) {}

  const char* take(size_t n) {
    if (pos_ + n > buf_.size()) throw IoError(name_ + ": truncated checkpoint");
    const char* p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }
  uint32_t u32() {
    uint32_t v;
    std::memcpy(&v, take(4), 4);
    return v;
  }
  std::string str(size_t n) { return std::string(take(n), n); }
  bool done() const { return pos_ == buf_.size(); }

 private:
  std::vector<char> buf_;
  std::string name_;
  size_t pos_ = 0;
};

// Every named tensor in the model, parameters then buffers.
std::map<std::string, Tensor<float>*> named_tensors(GanModel<float>& m) {
  std::map<std::string, Tensor<float>*> out;
  for (auto* p : m.generator.params()) out[p->name] = &p->value;
  for (auto* p : m.discriminator.params()) out[p->name] = &p->value;
  for (auto& [name, t] : m.generator.buffers()) out[name] = t;
  for (auto& [name, t] : m.discriminator.buffers()) out[name] = t;
  return out;
}

}  // namespace

nlohmann::json topology_to_json(const GanTopology& t) {
  return {{"rir_length", t.rir_length},
          {"base_length", t.base_length},
          {"gen_channels", t.gen_channels},
          {"disc_channels", t.disc_channels},
          {"embed_projection", t.embed_projection},
          {"kernel", t.kernel},
          {"stride", t.stride},
          {"padding", t.padding},
          {"output_padding", t.output_padding}};
}

GanTopology topology_from_json(const nlohmann::json& j) {
  GanTopology t;
  t.rir_length = j.at("rir_length");
  t.base_length = j.at("base_length");
  t.gen_channels = j.at("gen_channels").get<std::vector<int>>();
  t.disc_channels = j.at("disc_channels").get<std::vector<int>>();
  t.embed_projection = j.at("embed_projection");
  t.kernel = j.at("kernel");
  t.stride = j.at("stride");
  t.padding = j.at("padding");
  t.output_padding = j.at("output_padding");
  t.validate();
  return t;
}

void save_checkpoint(const std::filesystem::path& path, GanModel<float>& model,
                     int sample_rate) {
  const nlohmann::json header = {
      {"topology", topology_to_json(model.topology)},
      {"normalization",
       {{"d_max", model.normalization.d_max},
        {"t60_max", model.normalization.t60_max}}},
      {"sample_rate", sample_rate}};
  const std::string header_text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<uint32_t>(header_text.size()));
  out += header_text;
  const auto tensors = named_tensors(model);
  put_u32(out, static_cast<uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    put_u32(out, static_cast<uint32_t>(name.size()));
    out += name;
    put_u32(out, static_cast<uint32_t>(t->rank()));
    for (int d : t->shape()) put_u32(out, static_cast<uint32_t>(d));
    out.append(reinterpret_cast<const char*>(t->data()), t->size() * 4);
  }

  // Write-then-rename so an interrupted save never clobbers a good file.
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + tmp.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

LoadedModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint " + path.string());
  Reader r({std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()},
           path.string());
  if (std::memcmp(r.take(sizeof(kMagic)), kMagic, sizeof(kMagic)) != 0) {
    throw IoError(path.string() + ": not a fastrir checkpoint");
  }
  const uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw IoError(path.string() + ": unsupported checkpoint version " +
                  std::to_string(version));
  }
  LoadedModel loaded;
  GanTopology topo;
  NormalizationConfig norm;
  try {
    const nlohmann::json header = nlohmann::json::parse(r.str(r.u32()));
    topo = topology_from_json(header.at("topology"));
    norm.d_max = header.at("normalization").at("d_max");
    norm.t60_max = header.at("normalization").at("t60_max");
    loaded.sample_rate = header.at("sample_rate");
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": bad header: " + e.what());
  }
  loaded.model = std::make_unique<GanModel<float>>(topo, 0, norm);
  auto tensors = named_tensors(*loaded.model);

  const uint32_t count = r.u32();
  size_t matched = 0;
  for (uint32_t i = 0; i < count; ++i) {
    const std::string name = r.str(r.u32());
    std::vector<int> shape(r.u32());
    for (int& d : shape) d = static_cast<int>(r.u32());
    auto it = tensors.find(name);
    if (it == tensors.end()) {
      throw IoError(path.string() + ": unexpected tensor " + name);
    }
    if (it->second->shape() != shape) {
      throw IoError(path.string() + ": tensor " + name + " has shape " +
                    shape_string(shape) + ", model expects " +
                    shape_string(it->second->shape()));
    }
    std::memcpy(it->second->data(), r.take(it->second->size() * 4),
                it->second->size() * 4);
    ++matched;
  }
  if (matched != tensors.size() || !r.done()) {
    throw IoError(path.string() + ": checkpoint does not cover the model");
  }
  return loaded;
}

}  // namespace fastrir::nn
