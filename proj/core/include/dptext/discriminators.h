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

#ifndef DPTEXT_DISCRIMINATORS_H_
#define DPTEXT_DISCRIMINATORS_H_

#include <concepts>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "dptext/corpus.h"
#include "dptext/encoder.h"
#include "dptext/noise.h"
#include "dptext/numerics.h"

namespace dptext {

// Softmax classifier over a released vector, optionally with one tanh hidden
// layer. With hidden_width == 0 this is softmax(W x + b).
struct DenseHead {
  Matrix hidden_w;  // hidden_width x input_dim (empty when linear)
  Vector hidden_b;
  Matrix out_w;  // num_classes x (hidden_width or input_dim)
  Vector out_b;

  int hidden_width() const { return static_cast<int>(hidden_w.rows()); }
  int input_dim() const {
    return static_cast<int>(hidden_width() > 0 ? hidden_w.cols() : out_w.cols());
  }
  int num_classes() const { return static_cast<int>(out_w.rows()); }
};

template <typename Self, typename Fn>
  requires std::same_as<std::remove_const_t<Self>, DenseHead>
void ForEachParam(Self& p, Fn&& fn) {
  fn("hidden_w", p.hidden_w);
  fn("hidden_b", p.hidden_b);
  fn("out_w", p.out_w);
  fn("out_b", p.out_b);
}

// The semantic discriminator for classification and the per-attribute
// adversaries share this architecture.
using SemanticHead = DenseHead;
using AttributeHead = DenseHead;

DenseHead InitDenseHead(int input_dim, int hidden_width, int num_classes,
                        RngStream& rng, double init_scale = 0.08);
DenseHead ZeroDenseHead(int input_dim, int hidden_width, int num_classes);

struct HeadCache {
  Vector input;
  Vector hidden;
  Vector probs;
};

// Class distribution for `x`. Throws kShape if x has the wrong length.
Vector Classify(const Vector& x, const DenseHead& head, HeadCache* cache = nullptr);

void HeadBackward(const HeadCache& cache, const Vector& d_logits,
                  const DenseHead& head, DenseHead& grad, Vector* d_input);

// Frozen uniform draws r in (-1/2, 1/2), indexed [document][sample][coord].
// Holding them fixed turns every K-sample loss into a deterministic,
// differentiable function of epsilon.
class UniformDraws {
 public:
  UniformDraws() = default;
  UniformDraws(int batch, int samples, int dim);

  // Draws for document d come from its own stream, so a batch's draws do
  // not depend on which other documents share the batch or on evaluation
  // order.
  static UniformDraws ForDocuments(std::span<const int> doc_indices,
                                   int samples, int dim, uint64_t seed,
                                   uint64_t step);
  static UniformDraws Sample(int batch, int samples, int dim, RngStream& rng);

  double at(int b, int k, int i) const { return r_[Offset(b, k, i)]; }
  double& at(int b, int k, int i) { return r_[Offset(b, k, i)]; }
  int batch() const { return batch_; }
  int samples() const { return samples_; }
  int dim() const { return dim_; }

 private:
  size_t Offset(int b, int k, int i) const {
    return (static_cast<size_t>(b) * samples_ + k) * dim_ + i;
  }
  int batch_ = 0;
  int samples_ = 0;
  int dim_ = 0;
  std::vector<double> r_;
};

// Noise vector s^k for document b under `spec`, and its derivative in epsilon.
Vector NoiseFromDraws(const UniformDraws& draws, int b, int k,
                      const NoiseSpec& spec);

struct SemanticLossResult {
  double value = 0.0;
  DenseHead head_grad;
  double eps_grad = 0.0;
  std::vector<Vector> latent_grads;  // dL/dz per document
};

// L_DS = mean_b (1/K) sum_k CE(Classify(z_b + s_b^k), y_b), with gradients
// for the head, epsilon (through s = ReparamNoise(r, eps, delta)), and the
// latents.
SemanticLossResult SemanticLoss(std::span<const Vector> latents,
                                std::span<const int> labels,
                                const DenseHead& head, const NoiseSpec& spec,
                                const UniformDraws& draws);
SemanticLossResult SemanticLoss(std::span<const Vector> latents,
                                std::span<const int> labels,
                                const DenseHead& head, const NoiseSpec& spec,
                                RngStream& rng);

struct AttributeLossResult {
  double value = 0.0;
  std::vector<DenseHead> head_grads;
  double eps_grad = 0.0;
  std::vector<Vector> latent_grads;
};

// L_DP = mean_b 1/(K T) sum_t sum_k CE(head_t(z_b + s_b^k), p_bt).
// `attribute_labels[t][b]` is document b's value for attribute t. Throws
// kSchema if the heads and labels disagree on T or on cardinalities.
AttributeLossResult AttributeLoss(
    std::span<const Vector> latents,
    const std::vector<std::vector<int>>& attribute_labels,
    std::span<const DenseHead> heads, const NoiseSpec& spec,
    const UniformDraws& draws);
AttributeLossResult AttributeLoss(
    std::span<const Vector> latents,
    const std::vector<std::vector<int>>& attribute_labels,
    std::span<const DenseHead> heads, const NoiseSpec& spec, RngStream& rng);

struct TaggingLossResult {
  double value = 0.0;
  TaggerParams grad;
  // Per-token predictions read unperturbed states inside the trusted
  // boundary, so the tagging loss never depends on epsilon.
  double eps_grad = 0.0;
  // [h_m; h'_1] per document: the object that is perturbed and released.
  std::vector<Vector> doc_reps;
  std::vector<TaggerTrace> traces;
};

// Mean per-token cross-entropy of the tagger over all tokens in the batch.
// Throws kMissingTags if a document has no tags.
TaggingLossResult TaggingLoss(std::span<const Document* const> docs,
                              const TaggerParams& tagger);

}  // namespace dptext

#endif  // DPTEXT_DISCRIMINATORS_H_
