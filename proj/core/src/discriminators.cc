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

#include "dptext/discriminators.h"

#include <cmath>
#include <string>

namespace dptext {

DenseHead InitDenseHead(int input_dim, int hidden_width, int num_classes,
                        RngStream& rng, double init_scale) {
  DenseHead h = ZeroDenseHead(input_dim, hidden_width, num_classes);
  ForEachParam(h, [&](std::string_view, auto& t) {
    FillUniform(t, init_scale, rng);
  });
  return h;
}

DenseHead ZeroDenseHead(int input_dim, int hidden_width, int num_classes) {
  if (input_dim < 1 || hidden_width < 0 || num_classes < 1) {
    throw Error(ErrorCode::kInvalidDimension, "bad head dimensions");
  }
  DenseHead h;
  h.hidden_w = Matrix::Zero(hidden_width, hidden_width > 0 ? input_dim : 0);
  h.hidden_b = Vector::Zero(hidden_width);
  h.out_w = Matrix::Zero(num_classes, hidden_width > 0 ? hidden_width : input_dim);
  h.out_b = Vector::Zero(num_classes);
  return h;
}

Vector Classify(const Vector& x, const DenseHead& head, HeadCache* cache) {
  CheckLength(x, head.input_dim(), "classifier input");
  Vector probs;
  if (head.hidden_width() > 0) {
    Vector hidden =
        (head.hidden_w * x + head.hidden_b).array().tanh().matrix();
    probs = Softmax(head.out_w * hidden + head.out_b);
    if (cache != nullptr) cache->hidden = std::move(hidden);
  } else {
    probs = Softmax(head.out_w * x + head.out_b);
  }
  if (cache != nullptr) {
    cache->input = x;
    cache->probs = probs;
  }
  return probs;
}

void HeadBackward(const HeadCache& cache, const Vector& d_logits,
                  const DenseHead& head, DenseHead& grad, Vector* d_input) {
  grad.out_b += d_logits;
  if (head.hidden_width() > 0) {
    grad.out_w.noalias() += d_logits * cache.hidden.transpose();
    const Vector d_hidden = head.out_w.transpose() * d_logits;
    const Vector d_pre = d_hidden.cwiseProduct(
        (1.0 - cache.hidden.array().square()).matrix());
    grad.hidden_w.noalias() += d_pre * cache.input.transpose();
    grad.hidden_b += d_pre;
    if (d_input != nullptr) *d_input = head.hidden_w.transpose() * d_pre;
  } else {
    grad.out_w.noalias() += d_logits * cache.input.transpose();
    if (d_input != nullptr) *d_input = head.out_w.transpose() * d_logits;
  }
}

UniformDraws::UniformDraws(int batch, int samples, int dim)
    : batch_(batch), samples_(samples), dim_(dim),
      r_(static_cast<size_t>(batch) * samples * dim, 0.0) {
  if (batch < 0 || samples < 1 || dim < 1) {
    throw Error(ErrorCode::kInvalidArgument, "bad draw dimensions");
  }
}

UniformDraws UniformDraws::ForDocuments(std::span<const int> doc_indices,
                                        int samples, int dim, uint64_t seed,
                                        uint64_t step) {
  UniformDraws d(static_cast<int>(doc_indices.size()), samples, dim);
  const uint64_t step_stream = RngStream::SubStream(0x5eed, step);
  for (int b = 0; b < d.batch(); ++b) {
    RngStream rng(seed, RngStream::SubStream(step_stream, doc_indices[b]));
    for (int k = 0; k < samples; ++k) {
      for (int i = 0; i < dim; ++i) d.at(b, k, i) = DrawCenteredUniform(rng);
    }
  }
  return d;
}

UniformDraws UniformDraws::Sample(int batch, int samples, int dim,
                                  RngStream& rng) {
  UniformDraws d(batch, samples, dim);
  for (int b = 0; b < batch; ++b) {
    for (int k = 0; k < samples; ++k) {
      for (int i = 0; i < dim; ++i) d.at(b, k, i) = DrawCenteredUniform(rng);
    }
  }
  return d;
}

Vector NoiseFromDraws(const UniformDraws& draws, int b, int k,
                      const NoiseSpec& spec) {
  Vector s(spec.dim);
  for (int i = 0; i < spec.dim; ++i) {
    s[i] = ReparamNoise(draws.at(b, k, i), spec.epsilon, spec.delta);
  }
  return s;
}

namespace {

void CheckBatch(std::span<const Vector> latents, const NoiseSpec& spec,
                const UniformDraws& draws) {
  spec.Validate();
  if (draws.batch() != static_cast<int>(latents.size()) ||
      draws.samples() != spec.samples || draws.dim() != spec.dim) {
    throw Error(ErrorCode::kShape, "noise draws do not match batch/K/dim");
  }
  for (const auto& z : latents) CheckLength(z, spec.dim, "latent");
}

}  // namespace

SemanticLossResult SemanticLoss(std::span<const Vector> latents,
                                std::span<const int> labels,
                                const DenseHead& head, const NoiseSpec& spec,
                                const UniformDraws& draws) {
  CheckBatch(latents, spec, draws);
  if (labels.size() != latents.size()) {
    throw Error(ErrorCode::kLengthMismatch, "one label per latent required");
  }
  const int batch = static_cast<int>(latents.size());
  SemanticLossResult out;
  out.head_grad = ZerosLike(head);
  out.latent_grads.assign(batch, Vector::Zero(spec.dim));
  if (batch == 0) return out;
  const double w = 1.0 / (static_cast<double>(batch) * spec.samples);
  HeadCache cache;
  Vector d_input;
  for (int b = 0; b < batch; ++b) {
    for (int k = 0; k < spec.samples; ++k) {
      const Vector s = NoiseFromDraws(draws, b, k, spec);
      const Vector probs = Classify(latents[b] + s, head, &cache);
      out.value += w * CrossEntropy(probs, labels[b]);
      const Vector d_logits = w * SoftmaxCrossEntropyGrad(probs, labels[b]);
      HeadBackward(cache, d_logits, head, out.head_grad, &d_input);
      out.latent_grads[b] += d_input;
      // ds/deps = -s/eps
      out.eps_grad -= d_input.dot(s) / spec.epsilon;
    }
  }
  return out;
}

SemanticLossResult SemanticLoss(std::span<const Vector> latents,
                                std::span<const int> labels,
                                const DenseHead& head, const NoiseSpec& spec,
                                RngStream& rng) {
  const UniformDraws draws = UniformDraws::Sample(
      static_cast<int>(latents.size()), spec.samples, spec.dim, rng);
  return SemanticLoss(latents, labels, head, spec, draws);
}

AttributeLossResult AttributeLoss(
    std::span<const Vector> latents,
    const std::vector<std::vector<int>>& attribute_labels,
    std::span<const DenseHead> heads, const NoiseSpec& spec,
    const UniformDraws& draws) {
  CheckBatch(latents, spec, draws);
  const int num_attrs = static_cast<int>(heads.size());
  if (num_attrs == 0 || static_cast<int>(attribute_labels.size()) != num_attrs) {
    throw Error(ErrorCode::kSchema,
                "attribute heads and labels disagree on the attribute count");
  }
  const int batch = static_cast<int>(latents.size());
  for (int t = 0; t < num_attrs; ++t) {
    if (static_cast<int>(attribute_labels[t].size()) != batch) {
      throw Error(ErrorCode::kSchema, "attribute label count != batch size");
    }
    for (int v : attribute_labels[t]) {
      if (v < 0 || v >= heads[t].num_classes()) {
        throw Error(ErrorCode::kSchema,
                    "attribute value outside its head's cardinality");
      }
    }
  }
  AttributeLossResult out;
  for (const auto& h : heads) out.head_grads.push_back(ZerosLike(h));
  out.latent_grads.assign(batch, Vector::Zero(spec.dim));
  if (batch == 0) return out;
  const double w =
      1.0 / (static_cast<double>(batch) * spec.samples * num_attrs);
  HeadCache cache;
  Vector d_input;
  for (int b = 0; b < batch; ++b) {
    for (int k = 0; k < spec.samples; ++k) {
      const Vector s = NoiseFromDraws(draws, b, k, spec);
      const Vector noisy = latents[b] + s;
      Vector d_noisy = Vector::Zero(spec.dim);
      for (int t = 0; t < num_attrs; ++t) {
        const int y = attribute_labels[t][b];
        const Vector probs = Classify(noisy, heads[t], &cache);
        out.value += w * CrossEntropy(probs, y);
        const Vector d_logits = w * SoftmaxCrossEntropyGrad(probs, y);
        HeadBackward(cache, d_logits, heads[t], out.head_grads[t], &d_input);
        d_noisy += d_input;
      }
      out.latent_grads[b] += d_noisy;
      out.eps_grad -= d_noisy.dot(s) / spec.epsilon;
    }
  }
  return out;
}

AttributeLossResult AttributeLoss(
    std::span<const Vector> latents,
    const std::vector<std::vector<int>>& attribute_labels,
    std::span<const DenseHead> heads, const NoiseSpec& spec, RngStream& rng) {
  const UniformDraws draws = UniformDraws::Sample(
      static_cast<int>(latents.size()), spec.samples, spec.dim, rng);
  return AttributeLoss(latents, attribute_labels, heads, spec, draws);
}

TaggingLossResult TaggingLoss(std::span<const Document* const> docs,
                              const TaggerParams& tagger) {
  TaggingLossResult out;
  out.grad = ZerosLike(tagger);
  size_t total_tokens = 0;
  for (const Document* doc : docs) {
    if (doc->tags.empty()) {
      throw Error(ErrorCode::kMissingTags, "document '" + doc->id + "'");
    }
    if (doc->tags.size() != doc->tokens.size()) {
      throw Error(ErrorCode::kShape, "document '" + doc->id + "' tag count");
    }
    for (int tag : doc->tags) {
      if (tag < 0 || tag >= tagger.num_tags()) {
        throw Error(ErrorCode::kIndex, "tag outside tagger's tag set");
      }
    }
    total_tokens += doc->tokens.size();
  }
  if (total_tokens == 0) return out;
  const double w = 1.0 / static_cast<double>(total_tokens);
  std::vector<Vector> d_logits;
  for (const Document* doc : docs) {
    TaggerTrace trace = TaggerForward(doc->tokens, tagger);
    d_logits.clear();
    for (size_t i = 0; i < doc->tokens.size(); ++i) {
      out.value += w * CrossEntropy(trace.probs[i], doc->tags[i]);
      d_logits.push_back(w * SoftmaxCrossEntropyGrad(trace.probs[i], doc->tags[i]));
    }
    TaggerBackward(trace, doc->tokens, d_logits, nullptr, tagger, out.grad);
    out.doc_reps.push_back(trace.doc_rep);
    out.traces.push_back(std::move(trace));
  }
  return out;
}

}  // namespace dptext
