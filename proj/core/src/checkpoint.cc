//
// Copyright 2026 The DPText Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dptext/checkpoint.h"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dptext {

using nlohmann::json;

const TensorRecord& Checkpoint::Find(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t;
  }
  throw Error(ErrorCode::kIntegrity,
              "checkpoint has no tensor '" + std::string(name) + "'");
}

const std::string& Checkpoint::Meta(std::string_view key) const {
  auto it = meta.find(std::string(key));
  if (it == meta.end()) {
    throw Error(ErrorCode::kIntegrity,
                "checkpoint has no meta key '" + std::string(key) + "'");
  }
  return it->second;
}

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  json j;
  j["format"] = "dptext-checkpoint";
  j["version"] = Checkpoint::kVersion;
  j["kind"] = ckpt.kind;
  j["seed"] = ckpt.seed;
  j["meta"] = ckpt.meta;
  json tensors = json::array();
  for (const auto& t : ckpt.tensors) {
    tensors.push_back(
        {{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}, {"data", t.data}});
  }
  j["tensors"] = std::move(tensors);
  return j.dump() + "\n";
}

Checkpoint ParseCheckpoint(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "dptext-checkpoint") {
      throw Error(ErrorCode::kIntegrity, "not a dptext checkpoint");
    }
    if (j.at("version").get<int>() != Checkpoint::kVersion) {
      throw Error(ErrorCode::kIntegrity, "unsupported checkpoint version");
    }
    Checkpoint ckpt;
    ckpt.kind = j.at("kind").get<std::string>();
    ckpt.seed = j.at("seed").get<uint64_t>();
    ckpt.meta = j.at("meta").get<std::map<std::string, std::string>>();
    for (const auto& t : j.at("tensors")) {
      TensorRecord rec;
      rec.name = t.at("name").get<std::string>();
      rec.rows = t.at("rows").get<Eigen::Index>();
      rec.cols = t.at("cols").get<Eigen::Index>();
      rec.data = t.at("data").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(rec.data.size()) != rec.rows * rec.cols) {
        throw Error(ErrorCode::kIntegrity, rec.name + ": shape/data mismatch");
      }
      ckpt.tensors.push_back(std::move(rec));
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIntegrity, std::string("corrupt checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << SerializeCheckpoint(ckpt);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseCheckpoint(buf.str());
}

}  // namespace dptext
