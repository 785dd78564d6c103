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

#ifndef DPTEXT_TOOLS_COMMANDS_H_
#define DPTEXT_TOOLS_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dptext::cli {

// Process exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitArtifact = 3;
inline constexpr int kExitDivergence = 4;
inline constexpr int kExitAuditFailed = 5;

struct CommonFlags {
  std::string config;  // empty means built-in defaults
  std::optional<uint64_t> seed;
  std::string out;
};

struct PrepareFlags : CommonFlags {
  std::string corpus;  // optional existing JSONL instead of generation
};

struct TrainAutoencoderFlags : CommonFlags {
  std::string corpus;
};

struct TrainDpTextFlags : CommonFlags {
  std::string corpus;
  std::string autoencoder;
};

struct ReleaseFlags : CommonFlags {
  std::string corpus;
  std::string autoencoder;
  std::string model;
  std::string method;
};

struct AttackFlags : CommonFlags {
  std::string corpus;
  std::string release;
  std::vector<std::string> attributes;  // empty means every attribute
};

struct AuditFlags : CommonFlags {
  std::string release;
  std::optional<double> epsilon;
  std::optional<int> dim;
};

struct SweepFlags : CommonFlags {
  std::string corpus;
  std::string autoencoder;
  std::string probe_config;
  std::vector<double> alphas;
  std::vector<uint64_t> seeds;
};

struct ReportFlags : CommonFlags {
  std::string corpus;
  std::vector<std::string> releases;
  std::string audit_config;
};

// Each returns an exit code and throws dptext::Error on failure.
int RunPrepare(const PrepareFlags& flags);
int RunTrainAutoencoder(const TrainAutoencoderFlags& flags);
int RunTrainDpText(const TrainDpTextFlags& flags);
int RunRelease(const ReleaseFlags& flags);
int RunAttack(const AttackFlags& flags);
int RunAudit(const AuditFlags& flags);
int RunSweep(const SweepFlags& flags);
int RunReport(const ReportFlags& flags);

}  // namespace dptext::cli

#endif  // DPTEXT_TOOLS_COMMANDS_H_
