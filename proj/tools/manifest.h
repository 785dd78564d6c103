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

#ifndef DPTEXT_TOOLS_MANIFEST_H_
#define DPTEXT_TOOLS_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace dptext::cli {

// Hex SHA-256 of a file's bytes. Throws kIo if it cannot be read.
std::string Sha256File(const std::filesystem::path& path);

struct ArtifactRef {
  std::string path;
  std::string sha256;
};

// Written next to every output as `<output>.manifest.json`.
struct RunManifest {
  std::string command;
  uint64_t seed = 0;
  std::string config;  // resolved key=value text
  std::vector<ArtifactRef> inputs;
  std::vector<ArtifactRef> outputs;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();

  void AddInput(const std::filesystem::path& path);
  void AddOutput(const std::filesystem::path& path);
  nlohmann::ordered_json ToJson() const;
};

std::filesystem::path ManifestPath(const std::filesystem::path& artifact);

// Hashes the outputs and writes one manifest per output file.
void WriteManifests(RunManifest& manifest);

// Checks that `artifact` exists, has a manifest, and still matches the hash
// recorded there. Returns the manifest. Throws kIo for a missing file and
// kIntegrity for a missing manifest or a hash mismatch.
nlohmann::json VerifyArtifact(const std::filesystem::path& artifact);

}  // namespace dptext::cli

#endif  // DPTEXT_TOOLS_MANIFEST_H_
