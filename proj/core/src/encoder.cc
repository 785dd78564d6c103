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

#include "dptext/encoder.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "key_value.h"

namespace dptext {

namespace {

void CheckToken(int token, int vocab_size) {
  if (token < 0 || token >= vocab_size) {
    throw Error(ErrorCode::kIndex, "token id " + std::to_string(token) +
                                       " outside embedding table of size " +
                                       std::to_string(vocab_size));
  }
}

Vector SigmoidVec(const Vector& x) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = Sigmoid(x[i]);
  return out;
}

}  // namespace

GruParams GruParams::Zeros(int input_dim, int hidden_dim) {
  GruParams p;
  p.w_update = Matrix::Zero(hidden_dim, input_dim);
  p.w_reset = Matrix::Zero(hidden_dim, input_dim);
  p.w_candidate = Matrix::Zero(hidden_dim, input_dim);
  p.u_update = Matrix::Zero(hidden_dim, hidden_dim);
  p.u_reset = Matrix::Zero(hidden_dim, hidden_dim);
  p.u_candidate = Matrix::Zero(hidden_dim, hidden_dim);
  p.b_update = Vector::Zero(hidden_dim);
  p.b_reset = Vector::Zero(hidden_dim);
  p.b_candidate = Vector::Zero(hidden_dim);
  return p;
}

Vector GruStep(const Vector& input, const Vector& prev, const GruParams& params,
               GruStepCache* cache) {
  CheckLength(input, params.input_dim(), "gru input");
  CheckLength(prev, params.hidden_dim(), "gru state");
  const Vector update = SigmoidVec(params.w_update * input +
                                   params.u_update * prev + params.b_update);
  const Vector reset = SigmoidVec(params.w_reset * input +
                                  params.u_reset * prev + params.b_reset);
  const Vector candidate =
      (params.w_candidate * input +
       params.u_candidate * reset.cwiseProduct(prev) + params.b_candidate)
          .array()
          .tanh()
          .matrix();
  Vector next = (Vector::Ones(update.size()) - update).cwiseProduct(prev) +
                update.cwiseProduct(candidate);
  if (cache != nullptr) {
    cache->input = input;
    cache->prev = prev;
    cache->update = update;
    cache->reset = reset;
    cache->candidate = candidate;
  }
  return next;
}

void GruStepBackward(const GruStepCache& c, const Vector& d_next,
                     const GruParams& params, GruParams& grad, Vector* d_input,
                     Vector* d_prev) {
  const Vector& u = c.update;
  const Vector& r = c.reset;
  const Vector& h = c.prev;

  const Vector d_update = d_next.cwiseProduct(c.candidate - h);
  const Vector d_candidate = d_next.cwiseProduct(u);
  Vector dh = d_next.cwiseProduct(Vector::Ones(u.size()) - u);

  const Vector da_c = d_candidate.cwiseProduct(
      (1.0 - c.candidate.array().square()).matrix());
  const Vector rh = r.cwiseProduct(h);
  grad.w_candidate.noalias() += da_c * c.input.transpose();
  grad.u_candidate.noalias() += da_c * rh.transpose();
  grad.b_candidate += da_c;
  const Vector d_rh = params.u_candidate.transpose() * da_c;
  const Vector d_reset = d_rh.cwiseProduct(h);
  dh += d_rh.cwiseProduct(r);

  const Vector da_u =
      d_update.cwiseProduct(u.cwiseProduct(Vector::Ones(u.size()) - u));
  grad.w_update.noalias() += da_u * c.input.transpose();
  grad.u_update.noalias() += da_u * h.transpose();
  grad.b_update += da_u;
  dh.noalias() += params.u_update.transpose() * da_u;

  const Vector da_r =
      d_reset.cwiseProduct(r.cwiseProduct(Vector::Ones(r.size()) - r));
  grad.w_reset.noalias() += da_r * c.input.transpose();
  grad.u_reset.noalias() += da_r * h.transpose();
  grad.b_reset += da_r;
  dh.noalias() += params.u_reset.transpose() * da_r;

  if (d_input != nullptr) {
    *d_input = params.w_candidate.transpose() * da_c +
               params.w_update.transpose() * da_u +
               params.w_reset.transpose() * da_r;
  }
  if (d_prev != nullptr) *d_prev = std::move(dh);
}

bool LatentRepresentation::WithinBound() const {
  return values.allFinite() && values.cwiseAbs().maxCoeff() <= 1.0;
}

EncodeTrace EncodeWithTrace(std::span<const int> tokens,
                            const EncoderParams& params) {
  if (tokens.empty()) throw Error(ErrorCode::kEmptyDocument, "encode");
  EncodeTrace trace;
  trace.steps.resize(tokens.size());
  Vector state = Vector::Zero(params.latent_dim());
  for (size_t t = 0; t < tokens.size(); ++t) {
    CheckToken(tokens[t], params.vocab_size());
    state = GruStep(params.embedding.col(tokens[t]), state, params.gru,
                    &trace.steps[t]);
  }
  trace.final_state = std::move(state);
  return trace;
}

LatentRepresentation Encode(std::span<const int> tokens,
                            const EncoderParams& params) {
  if (tokens.empty()) throw Error(ErrorCode::kEmptyDocument, "encode");
  Vector state = Vector::Zero(params.latent_dim());
  for (int tok : tokens) {
    CheckToken(tok, params.vocab_size());
    state = GruStep(params.embedding.col(tok), state, params.gru);
  }
  return LatentRepresentation{std::move(state)};
}

LatentRepresentation Encode(const Document& doc, const EncoderParams& params) {
  return Encode(std::span<const int>(doc.tokens), params);
}

void EncodeBackward(const EncodeTrace& trace, std::span<const int> tokens,
                    const Vector& d_latent, const EncoderParams& params,
                    EncoderParams& grad) {
  Vector carry = d_latent;
  Vector d_input;
  for (size_t t = tokens.size(); t-- > 0;) {
    Vector d_prev;
    GruStepBackward(trace.steps[t], carry, params.gru, grad.gru, &d_input,
                    &d_prev);
    grad.embedding.col(tokens[t]) += d_input;
    carry = std::move(d_prev);
  }
}

std::vector<LatentRepresentation> EncodeAll(const Corpus& corpus,
                                            const EncoderParams& params) {
  std::vector<LatentRepresentation> out;
  out.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) out.push_back(Encode(doc, params));
  return out;
}

namespace {

GruParams InitGru(int input_dim, int hidden_dim, double scale, RngStream& rng) {
  GruParams p = GruParams::Zeros(input_dim, hidden_dim);
  ForEachParam(p, [&](std::string_view, auto& t) { FillUniform(t, scale, rng); });
  return p;
}

}  // namespace

AutoencoderParams InitAutoencoder(int vocab_size, int embed_dim, int latent_dim,
                                  uint64_t seed, double init_scale) {
  if (vocab_size < 1 || embed_dim < 1 || latent_dim < 1) {
    throw Error(ErrorCode::kInvalidDimension, "autoencoder dimensions must be >= 1");
  }
  RngStream rng(seed, /*stream=*/101);
  AutoencoderParams p;
  p.encoder.embedding = Matrix(embed_dim, vocab_size);
  FillUniform(p.encoder.embedding, init_scale, rng);
  p.encoder.gru = InitGru(embed_dim, latent_dim, init_scale, rng);
  p.decoder.embedding = Matrix(embed_dim, vocab_size);
  FillUniform(p.decoder.embedding, init_scale, rng);
  p.decoder.gru = InitGru(embed_dim, latent_dim, init_scale, rng);
  p.decoder.output = Matrix(vocab_size, latent_dim);
  FillUniform(p.decoder.output, init_scale, rng);
  p.decoder.output_bias = Vector(vocab_size);
  FillUniform(p.decoder.output_bias, init_scale, rng);
  return p;
}

std::vector<int> Decode(const LatentRepresentation& z,
                        const DecoderParams& params, int max_len) {
  if (max_len < 1) throw Error(ErrorCode::kInvalidArgument, "max_len must be >= 1");
  CheckLength(z.values, params.gru.hidden_dim(), "latent");
  std::vector<int> out;
  Vector state = z.values;
  int input = kPaddingId;
  while (static_cast<int>(out.size()) < max_len) {
    state = GruStep(params.embedding.col(input), state, params.gru);
    const Vector logits = params.output * state + params.output_bias;
    const int token = ArgMax(logits);
    out.push_back(token);
    if (token == kPaddingId) break;
    input = token;
  }
  return out;
}

double ReconstructionLoss(std::span<const int> tokens,
                          const AutoencoderParams& params,
                          AutoencoderParams* grad) {
  const EncodeTrace trace = EncodeWithTrace(tokens, params.encoder);
  const DecoderParams& dec = params.decoder;
  const size_t steps = tokens.size() + 1;

  std::vector<GruStepCache> caches(steps);
  std::vector<Vector> states(steps);
  std::vector<Vector> probs(steps);
  std::vector<int> inputs(steps);
  std::vector<int> targets(steps);
  double loss = 0.0;
  Vector state = trace.final_state;
  for (size_t t = 0; t < steps; ++t) {
    inputs[t] = t == 0 ? kPaddingId : tokens[t - 1];
    targets[t] = t < tokens.size() ? tokens[t] : kPaddingId;
    CheckToken(inputs[t], static_cast<int>(dec.embedding.cols()));
    state = GruStep(dec.embedding.col(inputs[t]), state, dec.gru, &caches[t]);
    states[t] = state;
    probs[t] = Softmax(dec.output * state + dec.output_bias);
    loss += CrossEntropy(probs[t], targets[t]);
  }
  const double scale = 1.0 / static_cast<double>(steps);
  loss *= scale;
  if (grad == nullptr) return loss;

  Vector carry = Vector::Zero(dec.gru.hidden_dim());
  Vector d_input;
  for (size_t t = steps; t-- > 0;) {
    const Vector d_logits = scale * SoftmaxCrossEntropyGrad(probs[t], targets[t]);
    grad->decoder.output.noalias() += d_logits * states[t].transpose();
    grad->decoder.output_bias += d_logits;
    Vector d_state = carry;
    d_state.noalias() += dec.output.transpose() * d_logits;
    Vector d_prev;
    GruStepBackward(caches[t], d_state, dec.gru, grad->decoder.gru, &d_input,
                    &d_prev);
    grad->decoder.embedding.col(inputs[t]) += d_input;
    carry = std::move(d_prev);
  }
  EncodeBackward(trace, tokens, carry, params.encoder, grad->encoder);
  return loss;
}

AutoencoderConfig ParseAutoencoderConfig(std::string_view text) {
  using namespace internal;
  constexpr ErrorCode kCode = ErrorCode::kInvalidArgument;
  AutoencoderConfig c;
  for (const auto& [key, value] : ParseKeyValues(text, kCode)) {
    if (key == "epochs") c.epochs = static_cast<int>(ParseInt(key, value, kCode));
    else if (key == "learning_rate") c.learning_rate = ParseDouble(key, value, kCode);
    else if (key == "embed_dim") c.embed_dim = static_cast<int>(ParseInt(key, value, kCode));
    else if (key == "latent_dim") c.latent_dim = static_cast<int>(ParseInt(key, value, kCode));
    else if (key == "batch_size") c.batch_size = static_cast<int>(ParseInt(key, value, kCode));
    else if (key == "clip_norm") c.clip_norm = ParseDouble(key, value, kCode);
    else if (key == "seed") c.seed = ParseUint(key, value, kCode);
    else throw Error(kCode, "unknown autoencoder config key '" + key + "'");
  }
  if (c.epochs < 0 || c.learning_rate < 0.0 || c.embed_dim < 1 ||
      c.latent_dim < 1 || c.batch_size < 1 || !(c.clip_norm > 0.0)) {
    throw Error(kCode, "autoencoder config out of range");
  }
  return c;
}

std::string FormatAutoencoderConfig(const AutoencoderConfig& c) {
  using internal::FormatDouble;
  std::ostringstream out;
  out << "epochs=" << c.epochs << "\n"
      << "learning_rate=" << FormatDouble(c.learning_rate) << "\n"
      << "embed_dim=" << c.embed_dim << "\n"
      << "latent_dim=" << c.latent_dim << "\n"
      << "batch_size=" << c.batch_size << "\n"
      << "clip_norm=" << FormatDouble(c.clip_norm) << "\n"
      << "seed=" << c.seed << "\n";
  return out.str();
}

AutoencoderResult TrainAutoencoder(const Corpus& corpus,
                                   const AutoencoderConfig& config) {
  std::vector<int> train = corpus.IndicesFor(Split::kTrain);
  if (train.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "corpus has no training documents");
  }
  AutoencoderResult result;
  result.params = InitAutoencoder(corpus.vocab.size(), config.embed_dim,
                                  config.latent_dim, config.seed);
  AdamOptimizer adam(config.learning_rate);
  std::vector<double> doc_loss(corpus.size(), 0.0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    RngStream rng(config.seed, RngStream::SubStream(202, epoch));
    std::vector<int> order = train;
    Shuffle(order, rng);
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      AutoencoderParams grad = ZerosLike(result.params);
      for (size_t k = start; k < end; ++k) {
        const int idx = order[k];
        doc_loss[idx] = ReconstructionLoss(corpus.documents[idx].tokens,
                                           result.params, &grad);
        if (!std::isfinite(doc_loss[idx])) {
          throw Error(ErrorCode::kDivergence,
                      "non-finite reconstruction loss at epoch " +
                          std::to_string(epoch));
        }
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      ForEachParam(grad, [&](std::string_view, auto& t) { t *= inv; });
      ClipGlobalNorm(grad, config.clip_norm);
      adam.Step(result.params, grad);
    }
    double total = 0.0;
    for (int idx : train) total += doc_loss[idx];
    result.loss_curve.push_back(total / static_cast<double>(train.size()));
  }
  CheckFiniteParams(result.params, "autoencoder");
  return result;
}

Checkpoint AutoencoderCheckpoint(const AutoencoderParams& params,
                                 const AutoencoderConfig& config) {
  Checkpoint ckpt;
  ckpt.kind = "autoencoder";
  ckpt.seed = config.seed;
  ckpt.meta["config"] = FormatAutoencoderConfig(config);
  ckpt.meta["vocab_size"] = std::to_string(params.encoder.vocab_size());
  ckpt.meta["latent_dim"] = std::to_string(params.encoder.latent_dim());
  AppendParams(ckpt, "autoencoder", params);
  return ckpt;
}

AutoencoderParams AutoencoderFromCheckpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != "autoencoder") {
    throw Error(ErrorCode::kIntegrity,
                "expected an autoencoder checkpoint, got '" + ckpt.kind + "'");
  }
  AutoencoderParams p;
  RestoreParams(ckpt, "autoencoder", p);
  CheckFiniteParams(p, "autoencoder");
  return p;
}

TaggerParams InitTagger(int vocab_size, int embed_dim, int hidden_dim,
                        int proj_dim, int num_tags, uint64_t seed,
                        double init_scale) {
  if (vocab_size < 1 || embed_dim < 1 || hidden_dim < 1 || proj_dim < 1 ||
      num_tags < 1) {
    throw Error(ErrorCode::kInvalidDimension, "tagger dimensions must be >= 1");
  }
  RngStream rng(seed, /*stream=*/303);
  TaggerParams p;
  p.embedding = Matrix(embed_dim, vocab_size);
  FillUniform(p.embedding, init_scale, rng);
  p.forward = InitGru(embed_dim, hidden_dim, init_scale, rng);
  p.backward = InitGru(embed_dim, hidden_dim, init_scale, rng);
  p.phi = Matrix(proj_dim, 2 * hidden_dim);
  FillUniform(p.phi, init_scale, rng);
  p.phi_bias = Vector(proj_dim);
  FillUniform(p.phi_bias, init_scale, rng);
  p.output = Matrix(num_tags, proj_dim);
  FillUniform(p.output, init_scale, rng);
  p.output_bias = Vector(num_tags);
  FillUniform(p.output_bias, init_scale, rng);
  return p;
}

TaggerTrace TaggerForward(std::span<const int> tokens,
                          const TaggerParams& params) {
  if (tokens.empty()) throw Error(ErrorCode::kEmptyDocument, "tag_sequence");
  const size_t m = tokens.size();
  const int h = params.hidden_dim();
  const int vocab = static_cast<int>(params.embedding.cols());
  TaggerTrace trace;
  trace.forward_steps.resize(m);
  trace.backward_steps.resize(m);
  trace.forward_states.resize(m);
  trace.backward_states.resize(m);
  trace.probs.resize(m);

  Vector state = Vector::Zero(h);
  for (size_t i = 0; i < m; ++i) {
    CheckToken(tokens[i], vocab);
    state = GruStep(params.embedding.col(tokens[i]), state, params.forward,
                    &trace.forward_steps[i]);
    trace.forward_states[i] = state;
  }
  state = Vector::Zero(h);
  for (size_t i = m; i-- > 0;) {
    state = GruStep(params.embedding.col(tokens[i]), state, params.backward,
                    &trace.backward_steps[i]);
    trace.backward_states[i] = state;
  }
  Vector joint(2 * h);
  for (size_t i = 0; i < m; ++i) {
    joint << trace.forward_states[i], trace.backward_states[i];
    const Vector projected = params.phi * joint + params.phi_bias;
    trace.probs[i] = Softmax(params.output * projected + params.output_bias);
  }
  trace.doc_rep.resize(2 * h);
  trace.doc_rep << trace.forward_states[m - 1], trace.backward_states[0];
  return trace;
}

std::vector<Vector> TagSequence(const Document& doc, const TaggerParams& params) {
  return TaggerForward(doc.tokens, params).probs;
}

void TaggerBackward(const TaggerTrace& trace, std::span<const int> tokens,
                    std::span<const Vector> d_logits, const Vector* d_doc_rep,
                    const TaggerParams& params, TaggerParams& grad) {
  const size_t m = tokens.size();
  const int h = params.hidden_dim();
  if (d_logits.size() != m) {
    throw Error(ErrorCode::kShape, "one logit gradient per token required");
  }
  std::vector<Vector> d_fwd(m, Vector::Zero(h));
  std::vector<Vector> d_bwd(m, Vector::Zero(h));
  Vector joint(2 * h);
  for (size_t i = 0; i < m; ++i) {
    joint << trace.forward_states[i], trace.backward_states[i];
    const Vector projected = params.phi * joint + params.phi_bias;
    grad.output.noalias() += d_logits[i] * projected.transpose();
    grad.output_bias += d_logits[i];
    const Vector d_proj = params.output.transpose() * d_logits[i];
    grad.phi.noalias() += d_proj * joint.transpose();
    grad.phi_bias += d_proj;
    const Vector d_joint = params.phi.transpose() * d_proj;
    d_fwd[i] += d_joint.head(h);
    d_bwd[i] += d_joint.tail(h);
  }
  if (d_doc_rep != nullptr) {
    CheckLength(*d_doc_rep, 2 * h, "doc rep gradient");
    d_fwd[m - 1] += d_doc_rep->head(h);
    d_bwd[0] += d_doc_rep->tail(h);
  }
  Vector carry = Vector::Zero(h);
  Vector d_input;
  for (size_t i = m; i-- > 0;) {
    Vector d_prev;
    GruStepBackward(trace.forward_steps[i], d_fwd[i] + carry, params.forward,
                    grad.forward, &d_input, &d_prev);
    grad.embedding.col(tokens[i]) += d_input;
    carry = std::move(d_prev);
  }
  carry = Vector::Zero(h);
  for (size_t i = 0; i < m; ++i) {
    Vector d_prev;
    GruStepBackward(trace.backward_steps[i], d_bwd[i] + carry, params.backward,
                    grad.backward, &d_input, &d_prev);
    grad.embedding.col(tokens[i]) += d_input;
    carry = std::move(d_prev);
  }
}

}  // namespace dptext
