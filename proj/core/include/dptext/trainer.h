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

#ifndef DPTEXT_TRAINER_H_
#define DPTEXT_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dptext/checkpoint.h"
#include "dptext/corpus.h"
#include "dptext/discriminators.h"
#include "dptext/encoder.h"
#include "dptext/noise.h"
#include "dptext/numerics.h"

namespace dptext {

enum class Task { kClassify, kTag };

std::string_view TaskName(Task task);
Task ParseTask(std::string_view name);

struct TrainConfig {
  double alpha = 1.0;
  double lambda = 0.01;
  double c1 = 0.1;
  int samples = 5;  // K
  int batch_size = 32;
  double learning_rate = 0.05;
  int epochs = 10;
  double eps_init = 0.1;
  double eps_floor = 1e-3;
  uint64_t seed = 1;
  Task task = Task::kClassify;
  // Names of the attributes that get an adversary. Empty means all.
  std::vector<std::string> attributes;
  // 0 gives a softmax directly on the released vector.
  int semantic_hidden = 0;
  int attribute_hidden = 32;
  // Tagger shape, used only when task == kTag.
  int tagger_embed_dim = 16;
  int tagger_hidden_dim = 8;
  int tagger_proj_dim = 16;
  // Stop early once the epoch-mean combined loss changes by less than this
  // (relative) for `convergence_window` consecutive epochs.
  double convergence_tol = 1e-4;
  int convergence_window = 3;

  // Throws kInvalidArgument on out-of-range fields.
  void Validate() const;
};

// Flat key=value text; every TrainConfig field is a key, and unknown keys
// are rejected. `attributes` is a comma-separated list.
TrainConfig ParseTrainConfig(std::string_view text);
std::string FormatTrainConfig(const TrainConfig& config);

struct TrainHistory {
  std::vector<double> semantic_loss;   // L_DS
  std::vector<double> attribute_loss;  // L_DP
  std::vector<double> epsilon;         // after projection
  std::vector<double> wall_time;       // seconds since training started
};

struct TrainState {
  Task task = Task::kClassify;
  DenseHead semantic;        // task == kClassify
  TaggerParams tagger;       // task == kTag
  std::vector<DenseHead> adversaries;
  std::vector<int> attribute_indices;  // schema index per adversary
  double epsilon = 0.1;
  int64_t step = 0;
  TrainHistory history;

  // Dimension of the released vector.
  int release_dim() const;
};

// Fresh state for `corpus`: heads, adversaries for the active attributes and
// epsilon = eps_init. `latent_dim` is ignored for the tagging task.
TrainState InitTrainState(const Corpus& corpus, int latent_dim,
                          const TrainConfig& config);

// One mini-batch. For classification the frozen encoder's latents are
// precomputed; for tagging the documents themselves are needed.
struct TrainBatch {
  std::vector<int> doc_indices;
  std::vector<Vector> latents;
  std::vector<const Document*> docs;
  std::vector<int> labels;
  std::vector<std::vector<int>> attribute_labels;  // [adversary][doc]
};

TrainBatch MakeBatch(const Corpus& corpus, std::span<const int> doc_indices,
                     std::span<const Vector> latents, const TrainState& state);

// The defender's objective J = L_DS - alpha * L_DP + lambda * Omega at the
// current state, where Omega sums the squared weights of the semantic head
// (or tagger) and every adversary. Gradients are taken over the defender's
// trainables only.
struct DefenderEval {
  double semantic_loss = 0.0;
  double attribute_loss = 0.0;
  double objective = 0.0;
  DenseHead semantic_grad;
  TaggerParams tagger_grad;
  double eps_grad = 0.0;
};

DefenderEval EvaluateDefender(const TrainBatch& batch, const TrainState& state,
                              const TrainConfig& config,
                              const UniformDraws& draws);

// Adversary step on L_DP, then a defender step on J with the same draws,
// then epsilon projection. Appends one history entry. Throws kDivergence on
// a non-finite loss.
void AdversarialStep(const TrainBatch& batch, TrainState& state,
                     const TrainConfig& config, const UniformDraws& draws,
                     double wall_time = 0.0);

double ProjectEpsilon(double eps, const TrainConfig& config);

struct TrainResult {
  TrainState state;
  double eps_tilde = 0.0;
  int epochs_run = 0;
  bool converged = false;
};

// Runs AdversarialStep over shuffled train-split mini-batches. The encoder
// is frozen and is only read when task == kClassify.
TrainResult TrainDpText(const Corpus& corpus, const EncoderParams& encoder,
                        const TrainConfig& config);

// Training log: CSV with header step,L_DS,L_DP,epsilon,wall_time.
std::string FormatTrainingLog(const TrainHistory& history);

Checkpoint TrainStateCheckpoint(const TrainState& state, const Corpus& corpus,
                                const TrainConfig& config);
TrainState TrainStateFromCheckpoint(const Checkpoint& ckpt);

enum class ReleaseMethod { kOriginal, kDifPriv, kDpText };

std::string_view ReleaseMethodName(ReleaseMethod method);
ReleaseMethod ParseReleaseMethod(std::string_view name);

// The representation each document would release: the encoder latent for
// classification, the tagger's [h_m; h'_1] for tagging.
std::vector<LatentRepresentation> ComputeRepresentations(
    const Corpus& corpus, const EncoderParams& encoder, const TrainState* state,
    Task task);

// Releases every document. Original publishes the raw representation with
// epsilon recorded as infinity; the noisy methods add Laplace(2d / epsilon)
// noise per document from a per-document stream of `seed`.
ReleasedSet ReleaseCorpus(const Corpus& corpus,
                          std::span<const LatentRepresentation> latents,
                          ReleaseMethod method, double epsilon, double eps_floor,
                          uint64_t seed);

}  // namespace dptext

#endif  // DPTEXT_TRAINER_H_
