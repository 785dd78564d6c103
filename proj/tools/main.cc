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

// Command-line front end: one subcommand per pipeline stage. Every stage
// reads hash-verified artifacts and writes its outputs with a manifest.

#include <exception>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "commands.h"
#include "dptext/error.h"

namespace {

using namespace dptext::cli;

int ExitCodeFor(dptext::ErrorCode code) {
  using dptext::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidSpec:
    case ErrorCode::kInvalidDimension:
      return kExitConfig;
    case ErrorCode::kIo:
    case ErrorCode::kIntegrity:
    case ErrorCode::kParse:
    case ErrorCode::kSchema:
    case ErrorCode::kMissingTags:
      return kExitArtifact;
    case ErrorCode::kDivergence:
      return kExitDivergence;
    default:
      return kExitInternal;
  }
}

void AddCommon(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "key=value config file");
  cmd->add_option("--seed", flags.seed, "overrides the seed in the config");
  cmd->add_option("--out", flags.out, "output path")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private text representations"};
  app.name("dptext");
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  std::function<int()> run;

  PrepareFlags prepare;
  auto* cmd = app.add_subcommand("prepare", "Generate or import a corpus");
  AddCommon(cmd, prepare);
  cmd->add_option("--spec", prepare.config, "synthetic corpus spec (same as --config)");
  cmd->add_option("--corpus", prepare.corpus, "existing corpus JSONL to import");
  cmd->callback([&] { run = [&] { return RunPrepare(prepare); }; });

  TrainAutoencoderFlags autoencoder;
  cmd = app.add_subcommand("train-autoencoder", "Pre-train the document autoencoder");
  AddCommon(cmd, autoencoder);
  cmd->add_option("--corpus", autoencoder.corpus)->required();
  cmd->callback([&] { run = [&] { return RunTrainAutoencoder(autoencoder); }; });

  TrainDpTextFlags train;
  cmd = app.add_subcommand("train-dptext", "Adversarially train the privacy budget");
  AddCommon(cmd, train);
  cmd->add_option("--corpus", train.corpus)->required();
  cmd->add_option("--autoencoder", train.autoencoder, "autoencoder checkpoint");
  cmd->callback([&] { run = [&] { return RunTrainDpText(train); }; });

  ReleaseFlags release;
  cmd = app.add_subcommand("release", "Publish representations");
  AddCommon(cmd, release);
  cmd->add_option("--corpus", release.corpus)->required();
  cmd->add_option("--autoencoder", release.autoencoder, "autoencoder checkpoint");
  cmd->add_option("--model", release.model, "trained dptext checkpoint");
  cmd->add_option("--method", release.method, "Original, DifPriv or DPText")
      ->required();
  cmd->callback([&] { run = [&] { return RunRelease(release); }; });

  AttackFlags attack;
  cmd = app.add_subcommand("attack", "Attribute inference attack on a release");
  AddCommon(cmd, attack);
  cmd->add_option("--corpus", attack.corpus)->required();
  cmd->add_option("--release", attack.release)->required();
  cmd->add_option("--attribute", attack.attributes, "attributes to attack");
  cmd->callback([&] { run = [&] { return RunAttack(attack); }; });

  AuditFlags audit;
  cmd = app.add_subcommand("audit", "Empirical DP audit of the release mechanism");
  AddCommon(cmd, audit);
  cmd->add_option("--release", audit.release);
  cmd->add_option("--epsilon", audit.epsilon);
  cmd->add_option("--dim", audit.dim);
  cmd->callback([&] { run = [&] { return RunAudit(audit); }; });

  SweepFlags sweep;
  cmd = app.add_subcommand("sweep", "Train and score DPText over a grid of alpha");
  AddCommon(cmd, sweep);
  cmd->add_option("--corpus", sweep.corpus)->required();
  cmd->add_option("--autoencoder", sweep.autoencoder)->required();
  cmd->add_option("--probe-config", sweep.probe_config);
  cmd->add_option("--alphas", sweep.alphas)->delimiter(',');
  cmd->add_option("--seeds", sweep.seeds)->delimiter(',');
  cmd->callback([&] { run = [&] { return RunSweep(sweep); }; });

  ReportFlags report;
  cmd = app.add_subcommand("report", "Score releases into the report CSV");
  AddCommon(cmd, report);
  cmd->add_option("--corpus", report.corpus)->required();
  cmd->add_option("--release", report.releases)->required();
  cmd->add_option("--audit-config", report.audit_config);
  cmd->callback([&] { run = [&] { return RunReport(report); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    return run();
  } catch (const dptext::Error& e) {
    std::cerr << "dptext: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "dptext: " << e.what() << "\n";
    return kExitInternal;
  }
}
