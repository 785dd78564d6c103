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

#ifndef DPTEXT_ENCODER_H_
#define DPTEXT_ENCODER_H_

#include <concepts>
#include <cstdint>
#include <span>
#include <string_view>
#include <type_traits>
#include <vector>

#include "dptext/checkpoint.h"
#include "dptext/corpus.h"
#include "dptext/numerics.h"

namespace dptext {

// Gated recurrent unit:
//   u  = sigmoid(W_u x + U_u h + b_u)
//   r  = sigmoid(W_r x + U_r h + b_r)
//   c  = tanh(W_c x + U_c (r * h) + b_c)
//   h' = (1 - u) * h + u * c
// h' is a convex mix of h and c, so h in [-1,1]^d implies h' in [-1,1]^d.
struct GruParams {
  Matrix w_update, w_reset, w_candidate;  // hidden x input
  Matrix u_update, u_reset, u_candidate;  // hidden x hidden
  Vector b_update, b_reset, b_candidate;  // hidden

  static GruParams Zeros(int input_dim, int hidden_dim);
  int input_dim() const { return static_cast<int>(w_update.cols()); }
  int hidden_dim() const { return static_cast<int>(w_update.rows()); }
};

template <typename Self, typename Fn>
  requires std::same_as<std::remove_const_t<Self>, GruParams>
void ForEachParam(Self& p, Fn&& fn) {
  fn("w_update", p.w_update);
  fn("w_reset", p.w_reset);
  fn("w_candidate", p.w_candidate);
  fn("u_update", p.u_update);
  fn("u_reset", p.u_reset);
  fn("u_candidate", p.u_candidate);
  fn("b_update", p.b_update);
  fn("b_reset", p.b_reset);
  fn("b_candidate", p.b_candidate);
}

struct GruStepCache {
  Vector input;
  Vector prev;
  Vector update;
  Vector reset;
  Vector candidate;
};

// One recurrent step. Throws kShape on dimension mismatch.
Vector GruStep(const Vector& input, const Vector& prev, const GruParams& params,
               GruStepCache* cache = nullptr);

// Backward through one step given dL/dh'. Accumulates parameter gradients
// into `grad` and writes dL/dinput and dL/dprev when requested.
void GruStepBackward(const GruStepCache& cache, const Vector& d_next,
                     const GruParams& params, GruParams& grad,
                     Vector* d_input, Vector* d_prev);

// Token embeddings are stored column-wise: embedding.col(token).
struct EncoderParams {
  Matrix embedding;  // embed_dim x vocab
  GruParams gru;     // embed_dim -> latent_dim

  int vocab_size() const { return static_cast<int>(embedding.cols()); }
  int embed_dim() const { return static_cast<int>(embedding.rows()); }
  int latent_dim() const { return gru.hidden_dim(); }
};

template <typename Self, typename Fn>
  requires std::same_as<std::remove_const_t<Self>, EncoderParams>
void ForEachParam(Self& p, Fn&& fn) {
  fn("embedding", p.embedding);
  ForEachParam(p.gru, Prefixed("gru", fn));
}

// The document latent z: the final encoder state. Every entry lies in
// [-1,1], which is what bounds the L1 sensitivity at 2 * dim.
struct LatentRepresentation {
  Vector values;

  int dim() const { return static_cast<int>(values.size()); }
  bool WithinBound() const;
};

// Encoder states for every prefix, kept for backpropagation.
struct EncodeTrace {
  std::vector<GruStepCache> steps;
  Vector final_state;
};

// Runs the GRU over `tokens` from the zero state. Throws kEmptyDocument on an
// empty sequence and kIndex on an out-of-vocabulary id.
LatentRepresentation Encode(std::span<const int> tokens,
                            const EncoderParams& params);
LatentRepresentation Encode(const Document& doc, const EncoderParams& params);
EncodeTrace EncodeWithTrace(std::span<const int> tokens,
                            const EncoderParams& params);
// Accumulates encoder gradients from dL/dz.
void EncodeBackward(const EncodeTrace& trace, std::span<const int> tokens,
                    const Vector& d_latent, const EncoderParams& params,
                    EncoderParams& grad);

std::vector<LatentRepresentation> EncodeAll(const Corpus& corpus,
                                            const EncoderParams& params);

// The decoder starts from s_0 = z. kPaddingId doubles as the start-of-sequence
// input and the end-of-sequence target.
struct DecoderParams {
  Matrix embedding;  // embed_dim x vocab
  GruParams gru;     // embed_dim -> latent_dim
  Matrix output;     // vocab x latent_dim
  Vector output_bias;
};

template <typename Self, typename Fn>
  requires std::same_as<std::remove_const_t<Self>, DecoderParams>
void ForEachParam(Self& p, Fn&& fn) {
  fn("embedding", p.embedding);
  ForEachParam(p.gru, Prefixed("gru", fn));
  fn("output", p.output);
  fn("output_bias", p.output_bias);
}

struct AutoencoderParams {
  EncoderParams encoder;
  DecoderParams decoder;
};

template <typename Self, typename Fn>
  requires std::same_as<std::remove_const_t<Self>, AutoencoderParams>
void ForEachParam(Self& p, Fn&& fn) {
  ForEachParam(p.encoder, Prefixed("encoder", fn));
  ForEachParam(p.decoder, Prefixed("decoder", fn));
}

// Weights uniform in [-init_scale, init_scale].
AutoencoderParams InitAutoencoder(int vocab_size, int embed_dim, int latent_dim,
                                  uint64_t seed, double init_scale = 0.08);

// Greedy generation from s_0 = z. Emits argmax tokens, stopping after the
// end token (which is included in the output) or after max_len tokens.
std::vector<int> Decode(const LatentRepresentation& z,
                        const DecoderParams& params, int max_len);

// Teacher-forced negative log-likelihood per target token (the document's
// tokens followed by the end token). Accumulates gradients when `grad` is
// non-null.
double ReconstructionLoss(std::span<const int> tokens,
                          const AutoencoderParams& params,
                          AutoencoderParams* grad = nullptr);

struct AutoencoderConfig {
  int epochs = 12;
  double learning_rate = 0.01;
  int embed_dim = 16;
  int latent_dim = 16;
  int batch_size = 16;
  double clip_norm = 5.0;
  uint64_t seed = 1;
};

AutoencoderConfig ParseAutoencoderConfig(std::string_view text);
std::string FormatAutoencoderConfig(const AutoencoderConfig& config);

struct AutoencoderResult {
  AutoencoderParams params;
  // Mean per-token NLL of each epoch, measured over the epoch's updates.
  std::vector<double> loss_curve;
};

// Adam on the train split, global-norm clipping. Throws kDivergence if the
// loss becomes non-finite.
AutoencoderResult TrainAutoencoder(const Corpus& corpus,
                                   const AutoencoderConfig& config);

Checkpoint AutoencoderCheckpoint(const AutoencoderParams& params,
                                 const AutoencoderConfig& config);
AutoencoderParams AutoencoderFromCheckpoint(const Checkpoint& ckpt);

// Bidirectional recurrent tagger:
//   h_i  = GRU(x_i, h_{i-1}),   h_0 = 0
//   h'_i = GRU'(x_i, h'_{i+1}), h'_{m+1} = 0
//   y_i  = softmax(W_o (W_phi [h_i; h'_i] + b_phi) + b_o)
// The document-level representation is [h_m; h'_1].
struct TaggerParams {
  Matrix embedding;  // embed_dim x vocab
  GruParams forward;
  GruParams backward;
  Matrix phi;  // proj_dim x (2 * hidden)
  Vector phi_bias;
  Matrix output;  // num_tags x proj_dim
  Vector output_bias;

  int hidden_dim() const { return forward.hidden_dim(); }
  int doc_rep_dim() const { return 2 * forward.hidden_dim(); }
  int num_tags() const { return static_cast<int>(output.rows()); }
};

template <typename Self, typename Fn>
  requires std::same_as<std::remove_const_t<Self>, TaggerParams>
void ForEachParam(Self& p, Fn&& fn) {
  fn("embedding", p.embedding);
  ForEachParam(p.forward, Prefixed("forward", fn));
  ForEachParam(p.backward, Prefixed("backward", fn));
  fn("phi", p.phi);
  fn("phi_bias", p.phi_bias);
  fn("output", p.output);
  fn("output_bias", p.output_bias);
}

TaggerParams InitTagger(int vocab_size, int embed_dim, int hidden_dim,
                        int proj_dim, int num_tags, uint64_t seed,
                        double init_scale = 0.08);

struct TaggerTrace {
  std::vector<GruStepCache> forward_steps;   // index i -> step producing h_i
  std::vector<GruStepCache> backward_steps;  // index i -> step producing h'_i
  std::vector<Vector> forward_states;        // h_1..h_m
  std::vector<Vector> backward_states;       // h'_1..h'_m
  std::vector<Vector> probs;                 // per-token distributions
  Vector doc_rep;                            // [h_m; h'_1]
};

TaggerTrace TaggerForward(std::span<const int> tokens,
                          const TaggerParams& params);

// Per-token tag distributions. Throws kEmptyDocument on an empty document.
std::vector<Vector> TagSequence(const Document& doc, const TaggerParams& params);

// Accumulates tagger gradients given dL/dlogits per token and, optionally,
// dL/d(doc_rep).
void TaggerBackward(const TaggerTrace& trace, std::span<const int> tokens,
                    std::span<const Vector> d_logits, const Vector* d_doc_rep,
                    const TaggerParams& params, TaggerParams& grad);

}  // namespace dptext

#endif  // DPTEXT_ENCODER_H_
