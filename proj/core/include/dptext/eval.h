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

#ifndef DPTEXT_EVAL_H_
#define DPTEXT_EVAL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dptext/corpus.h"
#include "dptext/discriminators.h"
#include "dptext/encoder.h"
#include "dptext/noise.h"
#include "dptext/trainer.h"

namespace dptext {

// Fraction of exact matches. Throws kLengthMismatch on unequal or empty
// inputs.
double Accuracy(std::span<const int> predictions, std::span<const int> labels);

// Unweighted mean over classes of 2PR / (P + R); a class with P + R = 0
// contributes 0. Throws kLengthMismatch on unequal lengths and kIndex on a
// class outside [0, num_classes).
double MacroF1(std::span<const int> predictions, std::span<const int> labels,
               int num_classes);

// Most frequent label, ties to the lowest class.
int MajorityClass(std::span<const int> labels, int num_classes);

// Settings shared by the attackers and the utility classifier. Both use the
// attribute-head architecture on standardized released vectors.
struct ProbeConfig {
  int hidden = 32;
  int max_epochs = 60;
  double learning_rate = 0.01;
  int batch_size = 64;
  // Training stops once the epoch loss changes by less than this (relative)
  // for three epochs in a row.
  double tolerance = 1e-4;
  // Share of the training examples held out for early stopping. The head
  // with the lowest held-out loss is kept, and training stops after
  // `patience` epochs without improvement. 0 disables the hold-out.
  double validation_fraction = 0.2;
  int patience = 5;
  uint64_t seed = 1;
};

ProbeConfig ParseProbeConfig(std::string_view text);
std::string FormatProbeConfig(const ProbeConfig& config);

struct Probe {
  DenseHead head;
  Vector mean;
  Vector stddev;
  int epochs_run = 0;

  int Predict(const Vector& x) const;
};

// Fits a probe on (features, labels) with Adam. Features are standardized
// with the training mean and deviation only.
Probe FitProbe(std::span<const Vector> features, std::span<const int> labels,
               int num_classes, const ProbeConfig& config);

// A release split into train/test halves by the corpus's split field.
struct ReleaseSplit {
  std::vector<Vector> train_x, test_x;
  std::vector<int> train_docs, test_docs;  // corpus indices
};

// Throws kSchema if an id is not in the corpus or appears twice.
ReleaseSplit SplitRelease(const ReleasedSet& release, const Corpus& corpus);

struct AttackResult {
  std::string attribute;
  Probe attacker;
  double macro_f1 = 0.0;
  std::vector<std::vector<int64_t>> confusion;  // [true][predicted]
  int train_size = 0;
  int test_size = 0;
};

// Trains a fresh attacker for `attribute` on the train-split released
// vectors and scores it on the test split. Throws kSchema on an unknown
// attribute or a release that does not match the corpus.
AttackResult RunAttack(const ReleasedSet& release, const Corpus& corpus,
                       std::string_view attribute, const ProbeConfig& config);

// Test accuracy of a task classifier trained on the release's train split.
double EvaluateUtility(const ReleasedSet& release, const Corpus& corpus,
                       const ProbeConfig& config);

// Per-token micro accuracy of the tagger on one split.
double TaggingAccuracy(const Corpus& corpus, const TaggerParams& tagger,
                       Split split);

struct EvalRow {
  std::string method;
  std::optional<double> alpha;  // set for trained (DPText) rows only
  uint64_t seed = 0;
  double epsilon_used = 0.0;  // infinity for Original
  double utility = 0.0;
  std::vector<double> attacker_f1;  // one per schema attribute
  int train_size = 0;
  int test_size = 0;
  // Empirical audit of the release mechanism; absent for Original.
  std::optional<AuditReport> audit;
  std::string release;  // file the row was computed from, if any
};

struct EvalReport {
  std::vector<std::string> attributes;
  std::vector<EvalRow> rows;
};

// Column order: method,alpha,seed,epsilon_used,utility,f1_<attr>...,
// n_train,n_test,audit,audit_max_log_ratio,audit_slack,release.
// Rows are sorted by (method, alpha, seed) so the output is byte-stable.
std::string FormatReportCsv(const EvalReport& report);

struct BaselineConfig {
  TrainConfig train;
  ProbeConfig probe;
  // Extra DPText runs, each defending only the listed attributes.
  std::vector<std::vector<std::string>> variants;
  bool audit = true;
  AuditConfig audit_config;
};

// Audits the Laplace mechanism at (epsilon, 2d) on the extreme pair
// z = 1^d, z' = -1^d.
AuditReport AuditRelease(double epsilon, int dim, const AuditConfig& config);

// Utility, one attack per schema attribute and, for noisy releases, the
// mechanism audit. Probes are seeded with `seed`.
EvalRow ScoreRelease(const ReleasedSet& release, const Corpus& corpus,
                     const BaselineConfig& config, uint64_t seed);

// Builds Original, DifPriv (epsilon = c1, untrained budget) and DPText
// releases under `seed`, then scores utility and every attribute attack on
// each. Classification task only.
std::vector<EvalRow> RunBaselines(const Corpus& corpus,
                                  const EncoderParams& encoder,
                                  const BaselineConfig& config, uint64_t seed);

struct SweepRow {
  double alpha = 0.0;
  uint64_t seed = 0;
  double utility = 0.0;
  std::vector<double> attacker_f1;
  double eps_tilde = 0.0;
};

// One DPText training and release per (alpha, seed).
std::vector<SweepRow> AlphaSweep(const Corpus& corpus,
                                 const EncoderParams& encoder,
                                 const BaselineConfig& config,
                                 std::span<const double> alphas,
                                 std::span<const uint64_t> seeds);

// Header alpha,seed,utility,f1_<attr>...,eps_tilde, sorted by (alpha, seed).
std::string FormatSweepCsv(std::span<const std::string> attributes,
                           std::vector<SweepRow> rows);

std::vector<std::string> AttributeNames(const CorpusSchema& schema);

}  // namespace dptext

#endif  // DPTEXT_EVAL_H_
