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

#include "commands.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dptext/checkpoint.h"
#include "dptext/corpus.h"
#include "dptext/encoder.h"
#include "dptext/error.h"
#include "dptext/eval.h"
#include "dptext/noise.h"
#include "dptext/trainer.h"
#include "manifest.h"

namespace dptext::cli {

namespace {

namespace fs = std::filesystem;

void Log(std::string_view command, const std::string& message) {
  std::cerr << "[dptext " << command << "] " << message << "\n";
}

std::string Num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Config files are user input, so a missing one is a usage problem.
std::string ReadConfig(const std::string& path) {
  if (path.empty()) return "";
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

// Parse failures in upstream artifacts count as corruption.
template <typename Fn>
auto AsArtifact(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo || e.code() == ErrorCode::kIntegrity) throw;
    throw Error(ErrorCode::kIntegrity, path + ": " + e.what());
  }
}

Corpus LoadArtifactCorpus(const std::string& path, RunManifest& manifest) {
  VerifyArtifact(path);
  manifest.AddInput(path);
  return AsArtifact(path, [&] { return LoadCorpus(path); });
}

Checkpoint LoadArtifactCheckpoint(const std::string& path, RunManifest& manifest) {
  VerifyArtifact(path);
  manifest.AddInput(path);
  return AsArtifact(path, [&] { return LoadCheckpoint(path); });
}

EncoderParams LoadEncoder(const std::string& path, RunManifest& manifest) {
  const Checkpoint ckpt = LoadArtifactCheckpoint(path, manifest);
  return AsArtifact(path, [&] { return AutoencoderFromCheckpoint(ckpt).encoder; });
}

void RequireFlag(const std::string& value, std::string_view name) {
  if (value.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--" + std::string(name) + " is required");
  }
}

}  // namespace

int RunPrepare(const PrepareFlags& flags) {
  RunManifest manifest;
  manifest.command = "prepare";
  Corpus corpus;
  if (!flags.corpus.empty()) {
    manifest.AddInput(flags.corpus);
    corpus = AsArtifact(flags.corpus, [&] { return LoadCorpus(flags.corpus); });
    manifest.seed = flags.seed.value_or(0);
    Log("prepare", "loaded " + std::to_string(corpus.size()) + " documents");
  } else {
    SyntheticSpec spec = ParseSyntheticSpec(ReadConfig(flags.config));
    if (flags.seed) spec.seed = *flags.seed;
    manifest.seed = spec.seed;
    manifest.config = FormatSyntheticSpec(spec);
    corpus = GenerateSyntheticCorpus(spec);
    Log("prepare", "generated " + std::to_string(corpus.size()) + " documents");
  }
  SaveCorpus(corpus, flags.out);
  manifest.AddOutput(flags.out);
  manifest.params["num_docs"] = corpus.size();
  manifest.params["vocab_size"] = corpus.vocab.size();
  manifest.params["num_train"] = corpus.IndicesFor(Split::kTrain).size();
  manifest.params["num_test"] = corpus.IndicesFor(Split::kTest).size();
  WriteManifests(manifest);
  return kExitOk;
}

int RunTrainAutoencoder(const TrainAutoencoderFlags& flags) {
  RequireFlag(flags.corpus, "corpus");
  RunManifest manifest;
  manifest.command = "train-autoencoder";
  AutoencoderConfig config = ParseAutoencoderConfig(ReadConfig(flags.config));
  if (flags.seed) config.seed = *flags.seed;
  manifest.seed = config.seed;
  manifest.config = FormatAutoencoderConfig(config);
  const Corpus corpus = LoadArtifactCorpus(flags.corpus, manifest);

  const AutoencoderResult result = TrainAutoencoder(corpus, config);
  for (size_t e = 0; e < result.loss_curve.size(); ++e) {
    Log("train-autoencoder",
        "epoch " + std::to_string(e + 1) + " loss " + Num(result.loss_curve[e]));
  }
  SaveCheckpoint(AutoencoderCheckpoint(result.params, config), flags.out);
  manifest.AddOutput(flags.out);
  manifest.params["final_loss"] =
      result.loss_curve.empty() ? 0.0 : result.loss_curve.back();
  manifest.params["latent_dim"] = config.latent_dim;
  WriteManifests(manifest);
  return kExitOk;
}

int RunTrainDpText(const TrainDpTextFlags& flags) {
  RequireFlag(flags.corpus, "corpus");
  RunManifest manifest;
  manifest.command = "train-dptext";
  TrainConfig config = ParseTrainConfig(ReadConfig(flags.config));
  if (flags.seed) config.seed = *flags.seed;
  manifest.seed = config.seed;
  manifest.config = FormatTrainConfig(config);
  const Corpus corpus = LoadArtifactCorpus(flags.corpus, manifest);
  EncoderParams encoder;
  if (config.task == Task::kClassify) {
    RequireFlag(flags.autoencoder, "autoencoder");
    encoder = LoadEncoder(flags.autoencoder, manifest);
  }

  const TrainResult result = TrainDpText(corpus, encoder, config);
  Log("train-dptext", std::to_string(result.state.step) + " steps, " +
                          std::to_string(result.epochs_run) + " epochs, eps " +
                          Num(result.eps_tilde));
  SaveCheckpoint(TrainStateCheckpoint(result.state, corpus, config), flags.out);
  const fs::path log_path = flags.out + ".log.csv";
  WriteText(log_path, FormatTrainingLog(result.state.history));
  manifest.AddOutput(flags.out);
  manifest.AddOutput(log_path);
  manifest.params["alpha"] = config.alpha;
  manifest.params["eps_tilde"] = result.eps_tilde;
  manifest.params["epochs_run"] = result.epochs_run;
  manifest.params["converged"] = result.converged;
  manifest.params["steps"] = result.state.step;
  WriteManifests(manifest);
  return kExitOk;
}

int RunRelease(const ReleaseFlags& flags) {
  RequireFlag(flags.corpus, "corpus");
  RequireFlag(flags.method, "method");
  RunManifest manifest;
  manifest.command = "release";
  const ReleaseMethod method = ParseReleaseMethod(flags.method);
  TrainConfig config = ParseTrainConfig(ReadConfig(flags.config));
  if (flags.seed) config.seed = *flags.seed;
  manifest.seed = config.seed;
  manifest.config = FormatTrainConfig(config);
  const Corpus corpus = LoadArtifactCorpus(flags.corpus, manifest);

  std::optional<TrainState> state;
  std::optional<double> alpha;
  double eps_floor = config.eps_floor;
  if (!flags.model.empty()) {
    const Checkpoint ckpt = LoadArtifactCheckpoint(flags.model, manifest);
    state = AsArtifact(flags.model, [&] { return TrainStateFromCheckpoint(ckpt); });
    if (ckpt.meta.contains("alpha")) alpha = std::stod(ckpt.Meta("alpha"));
    eps_floor = std::stod(ckpt.Meta("eps_floor"));
  } else if (method == ReleaseMethod::kDpText) {
    throw Error(ErrorCode::kInvalidArgument, "DPText release needs --model");
  }
  const Task task = state ? state->task : config.task;
  EncoderParams encoder;
  if (task == Task::kClassify) {
    RequireFlag(flags.autoencoder, "autoencoder");
    encoder = LoadEncoder(flags.autoencoder, manifest);
  }
  const std::vector<LatentRepresentation> reps =
      ComputeRepresentations(corpus, encoder, state ? &*state : nullptr, task);
  const double epsilon =
      method == ReleaseMethod::kDpText ? state->epsilon : config.c1;
  const ReleasedSet release =
      ReleaseCorpus(corpus, reps, method, epsilon, eps_floor, config.seed);
  WriteRelease(release, flags.out);
  Log("release", std::string(ReleaseMethodName(method)) + " with eps " +
                     Num(release.header.epsilon_used) + ", " +
                     std::to_string(release.size()) + " rows");
  manifest.AddOutput(flags.out);
  manifest.params["method"] = release.header.method;
  manifest.params["task"] = std::string(TaskName(task));
  manifest.params["dim"] = release.header.dim;
  manifest.params["epsilon_used"] = Num(release.header.epsilon_used);
  if (alpha && method == ReleaseMethod::kDpText) manifest.params["alpha"] = *alpha;
  WriteManifests(manifest);
  return kExitOk;
}

int RunAttack(const AttackFlags& flags) {
  RequireFlag(flags.corpus, "corpus");
  RequireFlag(flags.release, "release");
  RunManifest manifest;
  manifest.command = "attack";
  ProbeConfig config = ParseProbeConfig(ReadConfig(flags.config));
  if (flags.seed) config.seed = *flags.seed;
  manifest.seed = config.seed;
  manifest.config = FormatProbeConfig(config);
  const Corpus corpus = LoadArtifactCorpus(flags.corpus, manifest);
  VerifyArtifact(flags.release);
  manifest.AddInput(flags.release);
  const ReleasedSet release =
      AsArtifact(flags.release, [&] { return ReadRelease(flags.release); });

  const std::vector<std::string> attributes =
      flags.attributes.empty() ? AttributeNames(corpus.schema) : flags.attributes;
  std::ostringstream csv;
  csv << "attribute,macro_f1,n_train,n_test\n";
  for (const auto& name : attributes) {
    const AttackResult r = dptext::RunAttack(release, corpus, name, config);
    Log("attack", name + " macro-F1 " + Num(r.macro_f1));
    csv << name << "," << Num(r.macro_f1) << "," << r.train_size << ","
        << r.test_size << "\n";
  }
  WriteText(flags.out, csv.str());
  manifest.AddOutput(flags.out);
  WriteManifests(manifest);
  return kExitOk;
}

int RunAudit(const AuditFlags& flags) {
  RunManifest manifest;
  manifest.command = "audit";
  AuditConfig config = ParseAuditConfig(ReadConfig(flags.config));
  if (flags.seed) config.seed = *flags.seed;
  manifest.seed = config.seed;
  manifest.config = FormatAuditConfig(config);

  double epsilon = 0.0;
  int dim = 0;
  if (!flags.release.empty()) {
    VerifyArtifact(flags.release);
    manifest.AddInput(flags.release);
    const ReleasedSet release =
        AsArtifact(flags.release, [&] { return ReadRelease(flags.release); });
    epsilon = release.header.epsilon_used;
    dim = release.header.dim;
    if (!std::isfinite(epsilon)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "release carries no noise (epsilon = inf); nothing to audit");
    }
  } else if (flags.epsilon && flags.dim) {
    epsilon = *flags.epsilon;
    dim = *flags.dim;
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "audit needs --release or both --epsilon and --dim");
  }
  const AuditReport report = AuditRelease(epsilon, dim, config);
  WriteText(flags.out, FormatAuditReport(report));
  manifest.AddOutput(flags.out);
  manifest.params["result"] = report.pass ? "pass" : "fail";
  manifest.params["epsilon"] = epsilon;
  manifest.params["dim"] = dim;
  WriteManifests(manifest);
  std::cout << (report.pass ? "pass" : "fail") << "\n";
  Log("audit", "max |log ratio| " + Num(report.max_abs_log_ratio) +
                   " against eps " + Num(epsilon));
  return report.pass ? kExitOk : kExitAuditFailed;
}

int RunSweep(const SweepFlags& flags) {
  RequireFlag(flags.corpus, "corpus");
  RequireFlag(flags.autoencoder, "autoencoder");
  RunManifest manifest;
  manifest.command = "sweep";
  BaselineConfig config;
  config.train = ParseTrainConfig(ReadConfig(flags.config));
  config.probe = ParseProbeConfig(ReadConfig(flags.probe_config));
  if (config.train.task != Task::kClassify) {
    throw Error(ErrorCode::kInvalidArgument, "sweep runs the classification task");
  }
  std::vector<uint64_t> seeds = flags.seeds;
  if (seeds.empty()) seeds = {flags.seed.value_or(config.train.seed)};
  const std::vector<double> alphas =
      flags.alphas.empty()
          ? std::vector<double>{0.125, 0.25, 0.5, 1, 2, 4, 8, 16}
          : flags.alphas;
  manifest.seed = seeds.front();
  manifest.config = FormatTrainConfig(config.train) + FormatProbeConfig(config.probe);
  const Corpus corpus = LoadArtifactCorpus(flags.corpus, manifest);
  const EncoderParams encoder = LoadEncoder(flags.autoencoder, manifest);

  const std::vector<SweepRow> rows =
      AlphaSweep(corpus, encoder, config, alphas, seeds);
  WriteText(flags.out, FormatSweepCsv(AttributeNames(corpus.schema), rows));
  Log("sweep", std::to_string(rows.size()) + " cells");
  manifest.AddOutput(flags.out);
  WriteManifests(manifest);
  return kExitOk;
}

int RunReport(const ReportFlags& flags) {
  RequireFlag(flags.corpus, "corpus");
  if (flags.releases.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--release is required");
  }
  RunManifest manifest;
  manifest.command = "report";
  BaselineConfig config;
  config.probe = ParseProbeConfig(ReadConfig(flags.config));
  config.audit_config = ParseAuditConfig(ReadConfig(flags.audit_config));
  manifest.seed = flags.seed.value_or(config.probe.seed);
  manifest.config = FormatProbeConfig(config.probe) +
                    FormatAuditConfig(config.audit_config);
  const Corpus corpus = LoadArtifactCorpus(flags.corpus, manifest);

  EvalReport report;
  report.attributes = AttributeNames(corpus.schema);
  for (const auto& path : flags.releases) {
    const nlohmann::json upstream = VerifyArtifact(path);
    manifest.AddInput(path);
    const ReleasedSet release = AsArtifact(path, [&] { return ReadRelease(path); });
    EvalRow row = ScoreRelease(release, corpus, config,
                               flags.seed.value_or(release.header.seed));
    row.release = fs::path(path).filename().string();
    const auto& params = upstream.value("params", nlohmann::json::object());
    if (params.contains("alpha") && params["alpha"].is_number()) {
      row.alpha = params["alpha"].get<double>();
    }
    Log("report", row.release + ": utility " + Num(row.utility));
    report.rows.push_back(std::move(row));
  }
  WriteText(flags.out, FormatReportCsv(report));
  manifest.AddOutput(flags.out);
  WriteManifests(manifest);
  return kExitOk;
}

}  // namespace dptext::cli
