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

#include "manifest.h"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "dptext/error.h"

namespace dptext::cli {

namespace fs = std::filesystem;

std::string Sha256File(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "sha256 unavailable");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

void RunManifest::AddInput(const fs::path& path) {
  inputs.push_back({path.string(), Sha256File(path)});
}

void RunManifest::AddOutput(const fs::path& path) {
  outputs.push_back({path.string(), ""});
}

nlohmann::ordered_json RunManifest::ToJson() const {
  auto refs = [](const std::vector<ArtifactRef>& v) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& r : v) out.push_back({{"path", r.path}, {"sha256", r.sha256}});
    return out;
  };
  nlohmann::ordered_json j;
  j["manifest_version"] = 1;
  j["command"] = command;
  j["seed"] = seed;
  j["config"] = config;
  j["inputs"] = refs(inputs);
  j["outputs"] = refs(outputs);
  j["params"] = params;
  return j;
}

fs::path ManifestPath(const fs::path& artifact) {
  return fs::path(artifact.string() + ".manifest.json");
}

void WriteManifests(RunManifest& manifest) {
  for (auto& out : manifest.outputs) out.sha256 = Sha256File(out.path);
  const std::string text = manifest.ToJson().dump(2) + "\n";
  for (const auto& out : manifest.outputs) {
    const fs::path path = ManifestPath(out.path);
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  }
}

nlohmann::json VerifyArtifact(const fs::path& artifact) {
  if (!fs::exists(artifact)) {
    throw Error(ErrorCode::kIo, "missing artifact " + artifact.string());
  }
  const fs::path mpath = ManifestPath(artifact);
  std::ifstream in(mpath);
  if (!in) {
    throw Error(ErrorCode::kIntegrity, "no manifest for " + artifact.string());
  }
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIntegrity,
                "unreadable manifest " + mpath.string() + ": " + e.what());
  }
  const std::string actual = Sha256File(artifact);
  const std::string name = artifact.filename().string();
  if (manifest.contains("outputs") && manifest["outputs"].is_array()) {
    for (const auto& out : manifest["outputs"]) {
      if (!out.contains("path") || !out["path"].is_string()) continue;
      if (fs::path(out["path"].get<std::string>()).filename() != name) continue;
      if (out.value("sha256", "") != actual) {
        throw Error(ErrorCode::kIntegrity,
                    artifact.string() + " does not match its manifest hash");
      }
      return manifest;
    }
  }
  throw Error(ErrorCode::kIntegrity,
              "manifest " + mpath.string() + " does not list " + name);
}

}  // namespace dptext::cli
