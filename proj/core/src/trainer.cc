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

#include "dptext/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "key_value.h"

namespace dptext {

namespace {

constexpr uint64_t kStreamSemanticInit = 501;
constexpr uint64_t kStreamAdversaryInit = 502;
constexpr uint64_t kStreamEpochShuffle = 404;
constexpr uint64_t kStreamRelease = 606;

void CheckFiniteLoss(double v, std::string_view what, int64_t step) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kDivergence, std::string(what) +
                                            " is not finite at step " +
                                            std::to_string(step));
  }
}

std::string JoinNames(const std::vector<std::string>& names) {
  std::string out;
  for (size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ",";
    out += names[i];
  }
  return out;
}

NoiseSpec SpecFor(const TrainState& state, const TrainConfig& config) {
  return NoiseSpec::ForDimension(state.release_dim(), state.epsilon, config.c1,
                                 config.samples, config.eps_floor);
}

std::vector<Vector> TaggerReps(const TrainBatch& batch,
                               const TaggerParams& tagger) {
  std::vector<Vector> reps;
  reps.reserve(batch.docs.size());
  for (const Document* doc : batch.docs) {
    reps.push_back(TaggerForward(doc->tokens, tagger).doc_rep);
  }
  return reps;
}

}  // namespace

std::string_view TaskName(Task task) {
  return task == Task::kClassify ? "classify" : "tag";
}

Task ParseTask(std::string_view name) {
  if (name == "classify") return Task::kClassify;
  if (name == "tag") return Task::kTag;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown task '" + std::string(name) + "'");
}

void TrainConfig::Validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidArgument, msg);
  };
  if (!(alpha >= 0.0)) fail("alpha must be >= 0");
  if (!(lambda >= 0.0)) fail("lambda must be >= 0");
  if (!(eps_floor > 0.0 && eps_floor <= eps_init && eps_init <= c1)) {
    fail("need 0 < eps_floor <= eps_init <= c1");
  }
  if (samples < 1) fail("K must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(learning_rate >= 0.0)) fail("learning_rate must be >= 0");
  if (epochs < 0) fail("epochs must be >= 0");
  if (semantic_hidden < 0 || attribute_hidden < 0) {
    fail("head widths must be >= 0");
  }
  if (tagger_embed_dim < 1 || tagger_hidden_dim < 1 || tagger_proj_dim < 1) {
    fail("tagger dimensions must be >= 1");
  }
  if (!(convergence_tol >= 0.0) || convergence_window < 1) {
    fail("bad convergence settings");
  }
}

TrainConfig ParseTrainConfig(std::string_view text) {
  using namespace internal;
  constexpr ErrorCode kCode = ErrorCode::kInvalidArgument;
  TrainConfig c;
  bool eps_init_set = false;
  for (const auto& [key, value] : ParseKeyValues(text, kCode)) {
    auto as_int = [&] { return static_cast<int>(ParseInt(key, value, kCode)); };
    if (key == "alpha") c.alpha = ParseDouble(key, value, kCode);
    else if (key == "lambda") c.lambda = ParseDouble(key, value, kCode);
    else if (key == "c1") c.c1 = ParseDouble(key, value, kCode);
    else if (key == "K") c.samples = as_int();
    else if (key == "batch_size") c.batch_size = as_int();
    else if (key == "learning_rate") c.learning_rate = ParseDouble(key, value, kCode);
    else if (key == "epochs") c.epochs = as_int();
    else if (key == "eps_init") {
      c.eps_init = ParseDouble(key, value, kCode);
      eps_init_set = true;
    }
    else if (key == "eps_floor") c.eps_floor = ParseDouble(key, value, kCode);
    else if (key == "seed") c.seed = ParseUint(key, value, kCode);
    else if (key == "task") c.task = ParseTask(value);
    else if (key == "attributes") {
      c.attributes.clear();
      for (const auto& name : SplitOn(value, ',')) {
        const std::string trimmed(Trim(name));
        if (!trimmed.empty()) c.attributes.push_back(trimmed);
      }
    }
    else if (key == "semantic_hidden") c.semantic_hidden = as_int();
    else if (key == "attribute_hidden") c.attribute_hidden = as_int();
    else if (key == "tagger_embed_dim") c.tagger_embed_dim = as_int();
    else if (key == "tagger_hidden_dim") c.tagger_hidden_dim = as_int();
    else if (key == "tagger_proj_dim") c.tagger_proj_dim = as_int();
    else if (key == "convergence_tol") c.convergence_tol = ParseDouble(key, value, kCode);
    else if (key == "convergence_window") c.convergence_window = as_int();
    else throw Error(kCode, "unknown train config key '" + key + "'");
  }
  // Training starts at the cap unless told otherwise.
  if (!eps_init_set) c.eps_init = c.c1;
  c.Validate();
  return c;
}

std::string FormatTrainConfig(const TrainConfig& c) {
  using internal::FormatDouble;
  std::ostringstream out;
  out << "alpha=" << FormatDouble(c.alpha) << "\n"
      << "lambda=" << FormatDouble(c.lambda) << "\n"
      << "c1=" << FormatDouble(c.c1) << "\n"
      << "K=" << c.samples << "\n"
      << "batch_size=" << c.batch_size << "\n"
      << "learning_rate=" << FormatDouble(c.learning_rate) << "\n"
      << "epochs=" << c.epochs << "\n"
      << "eps_init=" << FormatDouble(c.eps_init) << "\n"
      << "eps_floor=" << FormatDouble(c.eps_floor) << "\n"
      << "seed=" << c.seed << "\n"
      << "task=" << TaskName(c.task) << "\n"
      << "attributes=" << JoinNames(c.attributes) << "\n"
      << "semantic_hidden=" << c.semantic_hidden << "\n"
      << "attribute_hidden=" << c.attribute_hidden << "\n"
      << "tagger_embed_dim=" << c.tagger_embed_dim << "\n"
      << "tagger_hidden_dim=" << c.tagger_hidden_dim << "\n"
      << "tagger_proj_dim=" << c.tagger_proj_dim << "\n"
      << "convergence_tol=" << FormatDouble(c.convergence_tol) << "\n"
      << "convergence_window=" << c.convergence_window << "\n";
  return out.str();
}

int TrainState::release_dim() const {
  return task == Task::kClassify ? semantic.input_dim() : tagger.doc_rep_dim();
}

TrainState InitTrainState(const Corpus& corpus, int latent_dim,
                          const TrainConfig& config) {
  config.Validate();
  const CorpusSchema& schema = corpus.schema;
  TrainState state;
  state.task = config.task;
  state.epsilon = config.eps_init;

  if (config.attributes.empty()) {
    for (size_t t = 0; t < schema.attributes.size(); ++t) {
      state.attribute_indices.push_back(static_cast<int>(t));
    }
  } else {
    std::set<std::string> seen;
    for (const auto& name : config.attributes) {
      if (!seen.insert(name).second) {
        throw Error(ErrorCode::kInvalidArgument,
                    "attribute '" + name + "' listed twice");
      }
      state.attribute_indices.push_back(schema.AttributeIndex(name));
    }
  }
  if (state.attribute_indices.empty()) {
    throw Error(ErrorCode::kSchema, "corpus has no private attributes");
  }

  if (config.task == Task::kClassify) {
    RngStream rng(config.seed, kStreamSemanticInit);
    state.semantic = InitDenseHead(latent_dim, config.semantic_hidden,
                                   schema.num_classes, rng);
  } else {
    if (schema.num_tags < 1) {
      throw Error(ErrorCode::kMissingTags, "corpus schema declares no tags");
    }
    state.tagger = InitTagger(corpus.vocab.size(), config.tagger_embed_dim,
                              config.tagger_hidden_dim, config.tagger_proj_dim,
                              schema.num_tags, config.seed);
  }
  const int dim = state.release_dim();
  for (size_t t = 0; t < state.attribute_indices.size(); ++t) {
    RngStream rng(config.seed, RngStream::SubStream(kStreamAdversaryInit, t));
    const int card = schema.attributes[state.attribute_indices[t]].cardinality;
    state.adversaries.push_back(
        InitDenseHead(dim, config.attribute_hidden, card, rng));
  }
  return state;
}

TrainBatch MakeBatch(const Corpus& corpus, std::span<const int> doc_indices,
                     std::span<const Vector> latents, const TrainState& state) {
  TrainBatch batch;
  batch.doc_indices.assign(doc_indices.begin(), doc_indices.end());
  batch.attribute_labels.resize(state.attribute_indices.size());
  for (int idx : doc_indices) {
    const Document& doc = corpus.documents.at(idx);
    if (state.task == Task::kClassify) {
      batch.latents.push_back(latents[idx]);
    } else {
      batch.docs.push_back(&doc);
    }
    batch.labels.push_back(doc.label);
    for (size_t t = 0; t < state.attribute_indices.size(); ++t) {
      batch.attribute_labels[t].push_back(
          doc.attributes.at(state.attribute_indices[t]));
    }
  }
  return batch;
}

DefenderEval EvaluateDefender(const TrainBatch& batch, const TrainState& state,
                              const TrainConfig& config,
                              const UniformDraws& draws) {
  const NoiseSpec spec = SpecFor(state, config);
  DefenderEval out;
  double omega = 0.0;
  for (const auto& head : state.adversaries) omega += SquaredNorm(head);

  if (state.task == Task::kClassify) {
    SemanticLossResult ds =
        SemanticLoss(batch.latents, batch.labels, state.semantic, spec, draws);
    AttributeLossResult dp = AttributeLoss(
        batch.latents, batch.attribute_labels, state.adversaries, spec, draws);
    omega += SquaredNorm(state.semantic);
    out.semantic_loss = ds.value;
    out.attribute_loss = dp.value;
    out.semantic_grad = std::move(ds.head_grad);
    AddScaled(out.semantic_grad, state.semantic, 2.0 * config.lambda);
    out.eps_grad = ds.eps_grad - config.alpha * dp.eps_grad;
  } else {
    TaggingLossResult ds = TaggingLoss(batch.docs, state.tagger);
    AttributeLossResult dp = AttributeLoss(
        ds.doc_reps, batch.attribute_labels, state.adversaries, spec, draws);
    omega += SquaredNorm(state.tagger);
    out.semantic_loss = ds.value;
    out.attribute_loss = dp.value;
    out.tagger_grad = std::move(ds.grad);
    for (size_t b = 0; b < batch.docs.size(); ++b) {
      const auto& tokens = batch.docs[b]->tokens;
      const std::vector<Vector> no_logits(
          tokens.size(), Vector::Zero(state.tagger.num_tags()));
      const Vector d_rep = -config.alpha * dp.latent_grads[b];
      TaggerBackward(ds.traces[b], tokens, no_logits, &d_rep, state.tagger,
                     out.tagger_grad);
    }
    AddScaled(out.tagger_grad, state.tagger, 2.0 * config.lambda);
    out.eps_grad = ds.eps_grad - config.alpha * dp.eps_grad;
  }
  out.objective = out.semantic_loss - config.alpha * out.attribute_loss +
                  config.lambda * omega;
  return out;
}

double ProjectEpsilon(double eps, const TrainConfig& config) {
  return std::min(std::max(eps, config.eps_floor), config.c1);
}

void AdversarialStep(const TrainBatch& batch, TrainState& state,
                     const TrainConfig& config, const UniformDraws& draws,
                     double wall_time) {
  const double lr = config.learning_rate;
  {
    const NoiseSpec spec = SpecFor(state, config);
    const std::vector<Vector> reps = state.task == Task::kClassify
                                         ? batch.latents
                                         : TaggerReps(batch, state.tagger);
    AttributeLossResult dp = AttributeLoss(reps, batch.attribute_labels,
                                           state.adversaries, spec, draws);
    CheckFiniteLoss(dp.value, "adversary loss", state.step);
    for (size_t t = 0; t < state.adversaries.size(); ++t) {
      AddScaled(state.adversaries[t], dp.head_grads[t], -lr);
    }
  }

  DefenderEval ev = EvaluateDefender(batch, state, config, draws);
  CheckFiniteLoss(ev.objective, "defender objective", state.step);
  CheckFiniteLoss(ev.eps_grad, "epsilon gradient", state.step);
  if (state.task == Task::kClassify) {
    AddScaled(state.semantic, ev.semantic_grad, -lr);
  } else {
    AddScaled(state.tagger, ev.tagger_grad, -lr);
  }
  state.epsilon = ProjectEpsilon(state.epsilon - lr * ev.eps_grad, config);

  state.history.semantic_loss.push_back(ev.semantic_loss);
  state.history.attribute_loss.push_back(ev.attribute_loss);
  state.history.epsilon.push_back(state.epsilon);
  state.history.wall_time.push_back(wall_time);
  ++state.step;
}

TrainResult TrainDpText(const Corpus& corpus, const EncoderParams& encoder,
                        const TrainConfig& config) {
  config.Validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  TrainResult result;
  result.state = InitTrainState(corpus, encoder.latent_dim(), config);
  TrainState& state = result.state;

  std::vector<Vector> latents;
  if (config.task == Task::kClassify) {
    for (auto& z : EncodeAll(corpus, encoder)) latents.push_back(std::move(z.values));
  }
  const std::vector<int> train = corpus.IndicesFor(Split::kTrain);
  if (train.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "corpus has no training documents");
  }

  std::vector<double> epoch_means;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    RngStream rng(config.seed, RngStream::SubStream(kStreamEpochShuffle, epoch));
    std::vector<int> order = train;
    Shuffle(order, rng);
    double sum = 0.0;
    int batches = 0;
    for (size_t pos = 0; pos < order.size(); pos += config.batch_size) {
      const size_t end = std::min(order.size(), pos + config.batch_size);
      const std::span<const int> idx(order.data() + pos, end - pos);
      const TrainBatch batch = MakeBatch(corpus, idx, latents, state);
      const UniformDraws draws = UniformDraws::ForDocuments(
          idx, config.samples, state.release_dim(), config.seed, state.step);
      AdversarialStep(batch, state, config, draws, elapsed());
      sum += state.history.semantic_loss.back() -
             config.alpha * state.history.attribute_loss.back();
      ++batches;
    }
    epoch_means.push_back(sum / batches);
    result.epochs_run = epoch + 1;

    const int w = config.convergence_window;
    if (static_cast<int>(epoch_means.size()) > w) {
      bool flat = true;
      for (size_t e = epoch_means.size() - w; e < epoch_means.size(); ++e) {
        const double prev = epoch_means[e - 1];
        const double rel = std::abs(epoch_means[e] - prev) /
                           std::max(std::abs(prev), 1e-12);
        if (!(rel < config.convergence_tol)) flat = false;
      }
      if (flat) {
        result.converged = true;
        break;
      }
    }
  }
  result.eps_tilde = state.epsilon;
  return result;
}

std::string FormatTrainingLog(const TrainHistory& h) {
  using internal::FormatDouble;
  std::ostringstream out;
  out << "step,L_DS,L_DP,epsilon,wall_time\n";
  for (size_t i = 0; i < h.epsilon.size(); ++i) {
    out << (i + 1) << "," << FormatDouble(h.semantic_loss[i]) << ","
        << FormatDouble(h.attribute_loss[i]) << ","
        << FormatDouble(h.epsilon[i]) << "," << FormatDouble(h.wall_time[i])
        << "\n";
  }
  return out.str();
}

Checkpoint TrainStateCheckpoint(const TrainState& state, const Corpus& corpus,
                                const TrainConfig& config) {
  using internal::FormatDouble;
  Checkpoint ckpt;
  ckpt.kind = "dptext";
  ckpt.seed = config.seed;
  ckpt.meta["task"] = std::string(TaskName(state.task));
  ckpt.meta["epsilon"] = FormatDouble(state.epsilon);
  ckpt.meta["step"] = std::to_string(state.step);
  ckpt.meta["alpha"] = FormatDouble(config.alpha);
  ckpt.meta["c1"] = FormatDouble(config.c1);
  ckpt.meta["eps_floor"] = FormatDouble(config.eps_floor);
  std::vector<std::string> names;
  std::string indices;
  for (int idx : state.attribute_indices) {
    names.push_back(corpus.schema.attributes.at(idx).name);
    if (!indices.empty()) indices += ",";
    indices += std::to_string(idx);
  }
  ckpt.meta["attributes"] = JoinNames(names);
  ckpt.meta["attribute_indices"] = indices;
  if (state.task == Task::kClassify) {
    AppendParams(ckpt, "semantic", state.semantic);
  } else {
    AppendParams(ckpt, "tagger", state.tagger);
  }
  for (size_t t = 0; t < state.adversaries.size(); ++t) {
    AppendParams(ckpt, "adversary." + std::to_string(t), state.adversaries[t]);
  }
  return ckpt;
}

TrainState TrainStateFromCheckpoint(const Checkpoint& ckpt) {
  using namespace internal;
  constexpr ErrorCode kCode = ErrorCode::kIntegrity;
  if (ckpt.kind != "dptext") {
    throw Error(kCode, "expected a dptext checkpoint, got '" + ckpt.kind + "'");
  }
  TrainState state;
  try {
    state.task = ParseTask(ckpt.Meta("task"));
  } catch (const Error& e) {
    throw Error(kCode, e.what());
  }
  state.epsilon = ParseDouble("epsilon", ckpt.Meta("epsilon"), kCode);
  state.step = ParseInt("step", ckpt.Meta("step"), kCode);
  for (const auto& s : SplitOn(ckpt.Meta("attribute_indices"), ',')) {
    state.attribute_indices.push_back(
        static_cast<int>(ParseInt("attribute_indices", s, kCode)));
  }
  if (state.task == Task::kClassify) {
    RestoreParams(ckpt, "semantic", state.semantic);
  } else {
    RestoreParams(ckpt, "tagger", state.tagger);
  }
  state.adversaries.resize(state.attribute_indices.size());
  for (size_t t = 0; t < state.adversaries.size(); ++t) {
    RestoreParams(ckpt, "adversary." + std::to_string(t), state.adversaries[t]);
  }
  return state;
}

std::string_view ReleaseMethodName(ReleaseMethod method) {
  switch (method) {
    case ReleaseMethod::kOriginal: return "Original";
    case ReleaseMethod::kDifPriv: return "DifPriv";
    case ReleaseMethod::kDpText: return "DPText";
  }
  return "";
}

ReleaseMethod ParseReleaseMethod(std::string_view name) {
  if (name == "Original") return ReleaseMethod::kOriginal;
  if (name == "DifPriv") return ReleaseMethod::kDifPriv;
  if (name == "DPText") return ReleaseMethod::kDpText;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown release method '" + std::string(name) + "'");
}

std::vector<LatentRepresentation> ComputeRepresentations(
    const Corpus& corpus, const EncoderParams& encoder, const TrainState* state,
    Task task) {
  if (task == Task::kClassify) return EncodeAll(corpus, encoder);
  if (state == nullptr || state->task != Task::kTag) {
    throw Error(ErrorCode::kInvalidArgument,
                "tagging representations need a trained tagger");
  }
  std::vector<LatentRepresentation> out;
  out.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    out.push_back({TaggerForward(doc.tokens, state->tagger).doc_rep});
  }
  return out;
}

ReleasedSet ReleaseCorpus(const Corpus& corpus,
                          std::span<const LatentRepresentation> latents,
                          ReleaseMethod method, double epsilon, double eps_floor,
                          uint64_t seed) {
  if (latents.size() != corpus.documents.size()) {
    throw Error(ErrorCode::kLengthMismatch, "one representation per document");
  }
  if (latents.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "nothing to release");
  }
  const int dim = latents.front().dim();
  ReleasedSet out;
  out.header.dim = dim;
  out.header.delta_used = Sensitivity(dim);
  out.header.seed = seed;
  out.header.method = std::string(ReleaseMethodName(method));
  if (method == ReleaseMethod::kOriginal) {
    out.header.epsilon_used = std::numeric_limits<double>::infinity();
  } else {
    if (!(epsilon >= eps_floor && eps_floor > 0.0 && std::isfinite(epsilon))) {
      throw Error(ErrorCode::kInvalidArgument,
                  "release epsilon below the floor");
    }
    out.header.epsilon_used = epsilon;
  }
  NoiseSpec spec;
  if (method != ReleaseMethod::kOriginal) {
    spec = NoiseSpec::ForDimension(dim, epsilon, epsilon, 1, eps_floor);
  }
  for (size_t i = 0; i < latents.size(); ++i) {
    out.ids.push_back(corpus.documents[i].id);
    if (method == ReleaseMethod::kOriginal) {
      CheckLength(latents[i].values, dim, "representation");
      out.rows.push_back(latents[i].values);
    } else {
      RngStream rng(seed, RngStream::SubStream(kStreamRelease, i));
      out.rows.push_back(Release(latents[i], spec, rng).values);
    }
  }
  return out;
}

}  // namespace dptext
