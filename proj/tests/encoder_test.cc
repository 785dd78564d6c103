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

#include <cmath>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dptext {
namespace {

using testing::GradientsMatch;
using testing::NumericParamGrad;

constexpr double kGradTol = 1e-5;

GruParams RandomGru(int input, int hidden, double scale, RngStream& rng) {
  GruParams p = GruParams::Zeros(input, hidden);
  ForEachParam(p, [&](std::string_view, auto& t) { FillUniform(t, scale, rng); });
  return p;
}

Vector RandomVector(int n, double scale, RngStream& rng) {
  Vector v(n);
  FillUniform(v, scale, rng);
  return v;
}

// Entry-by-entry GRU step written with plain loops, independent of Eigen
// expressions used by the library.
std::vector<double> ScalarGruStep(const std::vector<double>& x,
                                  const std::vector<double>& h,
                                  const GruParams& p) {
  const size_t n = h.size();
  auto sigmoid = [](double a) { return 1.0 / (1.0 + std::exp(-a)); };
  std::vector<double> u(n), r(n), out(n);
  for (size_t i = 0; i < n; ++i) {
    double au = p.b_update[i], ar = p.b_reset[i];
    for (size_t j = 0; j < x.size(); ++j) {
      au += p.w_update(i, j) * x[j];
      ar += p.w_reset(i, j) * x[j];
    }
    for (size_t j = 0; j < n; ++j) {
      au += p.u_update(i, j) * h[j];
      ar += p.u_reset(i, j) * h[j];
    }
    u[i] = sigmoid(au);
    r[i] = sigmoid(ar);
  }
  for (size_t i = 0; i < n; ++i) {
    double ac = p.b_candidate[i];
    for (size_t j = 0; j < x.size(); ++j) ac += p.w_candidate(i, j) * x[j];
    for (size_t j = 0; j < n; ++j) ac += p.u_candidate(i, j) * r[j] * h[j];
    out[i] = (1.0 - u[i]) * h[i] + u[i] * std::tanh(ac);
  }
  return out;
}

std::vector<double> ToStd(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<double> EmbeddingOf(const Matrix& e, int token) {
  return ToStd(e.col(token));
}

TEST(GruStepTest, ZeroWeightsAndStateGiveZero) {
  const GruParams p = GruParams::Zeros(3, 4);
  const Vector next = GruStep(Vector::Ones(3), Vector::Zero(4), p);
  EXPECT_EQ(next, Vector::Zero(4));
}

TEST(GruStepTest, StaysInsideUnitBox) {
  RngStream rng(1, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const GruParams p = RandomGru(3, 5, 10.0, rng);
    const Vector prev = RandomVector(5, 1.0, rng);
    const Vector next = GruStep(RandomVector(3, 10.0, rng), prev, p);
    EXPECT_LE(next.cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(GruStepTest, MatchesScalarReimplementation) {
  RngStream rng(2, 0);
  const GruParams p = RandomGru(3, 3, 1.0, rng);
  const Vector x = RandomVector(3, 1.0, rng);
  const Vector h = RandomVector(3, 1.0, rng);
  const Vector got = GruStep(x, h, p);
  const std::vector<double> want = ScalarGruStep(ToStd(x), ToStd(h), p);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(GruStepTest, ShapeMismatch) {
  const GruParams p = GruParams::Zeros(3, 4);
  EXPECT_DPTEXT_ERROR(GruStep(Vector::Zero(2), Vector::Zero(4), p),
                      ErrorCode::kShape);
  EXPECT_DPTEXT_ERROR(GruStep(Vector::Zero(3), Vector::Zero(5), p),
                      ErrorCode::kShape);
}

TEST(GruStepTest, BackwardMatchesFiniteDifferences) {
  RngStream rng(3, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int in = 1 + rng.NextInt(5), hid = 1 + rng.NextInt(5);
    const GruParams p = RandomGru(in, hid, 1.0, rng);
    const Vector x = RandomVector(in, 1.0, rng);
    const Vector h = RandomVector(hid, 1.0, rng);
    const Vector w = RandomVector(hid, 1.0, rng);

    GruStepCache cache;
    GruStep(x, h, p, &cache);
    GruParams grad = ZerosLike(p);
    Vector dx, dh;
    GruStepBackward(cache, w, p, grad, &dx, &dh);

    EXPECT_TRUE(GradientsMatch(
        Flatten(grad),
        NumericParamGrad(p, [&](const GruParams& q) { return w.dot(GruStep(x, h, q)); }),
        kGradTol));
    EXPECT_TRUE(GradientsMatch(
        dx, FiniteDiffGrad([&](const Vector& v) { return w.dot(GruStep(v, h, p)); }, x, 1e-6),
        kGradTol));
    EXPECT_TRUE(GradientsMatch(
        dh, FiniteDiffGrad([&](const Vector& v) { return w.dot(GruStep(x, v, p)); }, h, 1e-6),
        kGradTol));
  }
}

EncoderParams RandomEncoder(int vocab, int embed, int latent, double scale,
                            RngStream& rng) {
  EncoderParams p;
  p.embedding = Matrix(embed, vocab);
  FillUniform(p.embedding, scale, rng);
  p.gru = RandomGru(embed, latent, scale, rng);
  return p;
}

TEST(EncodeTest, SingleTokenIsOneStep) {
  RngStream rng(4, 0);
  const EncoderParams p = RandomEncoder(10, 3, 4, 1.0, rng);
  const std::vector<int> tokens = {7};
  const Vector want = GruStep(p.embedding.col(7), Vector::Zero(4), p.gru);
  EXPECT_EQ(Encode(tokens, p).values, want);
}

TEST(EncodeTest, MatchesManualUnroll) {
  RngStream rng(5, 0);
  const EncoderParams p = RandomEncoder(10, 3, 4, 0.5, rng);
  const std::vector<int> tokens = {2, 9, 4, 4, 0, 5};
  std::vector<double> state(4, 0.0);
  for (int tok : tokens) state = ScalarGruStep(EmbeddingOf(p.embedding, tok), state, p.gru);
  const Vector got = Encode(tokens, p).values;
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(got[i], state[i], 1e-12);
}

TEST(EncodeTest, LatentsStayInUnitBoxForLargeWeights) {
  RngStream rng(6, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const EncoderParams p = RandomEncoder(12, 4, 6, 10.0, rng);
    std::vector<int> tokens(1 + rng.NextInt(20));
    for (int& t : tokens) t = rng.NextInt(12);
    const LatentRepresentation z = Encode(tokens, p);
    EXPECT_TRUE(z.WithinBound());
    EXPECT_LE(z.values.cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(EncodeTest, Errors) {
  RngStream rng(7, 0);
  const EncoderParams p = RandomEncoder(5, 2, 2, 1.0, rng);
  EXPECT_DPTEXT_ERROR(Encode(std::vector<int>{}, p), ErrorCode::kEmptyDocument);
  EXPECT_DPTEXT_ERROR(Encode(std::vector<int>{1, 5}, p), ErrorCode::kIndex);
  EXPECT_DPTEXT_ERROR(Encode(std::vector<int>{-1}, p), ErrorCode::kIndex);
}

TEST(EncodeTest, BackwardMatchesFiniteDifferences) {
  RngStream rng(8, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const EncoderParams p = RandomEncoder(6, 1 + rng.NextInt(4), 1 + rng.NextInt(5), 1.0, rng);
    std::vector<int> tokens(1 + rng.NextInt(5));
    for (int& t : tokens) t = rng.NextInt(6);
    const Vector w = RandomVector(p.latent_dim(), 1.0, rng);
    EncoderParams grad = ZerosLike(p);
    EncodeBackward(EncodeWithTrace(tokens, p), tokens, w, p, grad);
    EXPECT_TRUE(GradientsMatch(
        Flatten(grad),
        NumericParamGrad(p, [&](const EncoderParams& q) {
          return w.dot(Encode(tokens, q).values);
        }),
        kGradTol));
  }
}

TEST(ReconstructionLossTest, GradientMatchesFiniteDifferences) {
  for (uint64_t seed = 1; seed <= 4; ++seed) {
    AutoencoderParams p = InitAutoencoder(7, 3, 4, seed, 0.5);
    const std::vector<int> tokens = {2, 5, 3, 6};
    AutoencoderParams grad = ZerosLike(p);
    ReconstructionLoss(tokens, p, &grad);
    EXPECT_TRUE(GradientsMatch(
        Flatten(grad),
        NumericParamGrad(p, [&](const AutoencoderParams& q) {
          return ReconstructionLoss(tokens, q);
        }),
        kGradTol));
  }
}

TEST(ReconstructionLossTest, UniformDecoderGivesLogVocab) {
  AutoencoderParams p = InitAutoencoder(9, 3, 4, 1);
  p.decoder.output.setZero();
  p.decoder.output_bias.setZero();
  EXPECT_NEAR(ReconstructionLoss(std::vector<int>{3, 4}, p), std::log(9.0), 1e-12);
}

Corpus OneDocCorpus() {
  Corpus c;
  c.schema.num_classes = 2;
  c.schema.attributes = {{"g", 2}};
  for (const char* w : {"the", "service", "was", "quick", "and", "kind"}) c.vocab.Add(w);
  Document doc;
  doc.id = "only";
  doc.tokens = {2, 3, 4, 5, 6, 7};
  doc.attributes = {0};
  c.documents.push_back(doc);
  return c;
}

TEST(TrainAutoencoderTest, OverfitsOneDocumentAndDecodesIt) {
  const Corpus c = OneDocCorpus();
  AutoencoderConfig config;
  config.epochs = 200;
  config.learning_rate = 0.05;
  const AutoencoderResult r = TrainAutoencoder(c, config);
  EXPECT_LT(r.loss_curve.back(), 0.1);
  const LatentRepresentation z = Encode(c.documents[0], r.params.encoder);
  std::vector<int> want = c.documents[0].tokens;
  want.push_back(kPaddingId);
  EXPECT_EQ(Decode(z, r.params.decoder, 20), want);
}

TEST(TrainAutoencoderTest, ConvergesWithinBudgetAtDefaultRate) {
  const Corpus c = OneDocCorpus();
  AutoencoderConfig config;
  config.epochs = 500;
  const AutoencoderResult r = TrainAutoencoder(c, config);
  EXPECT_LT(r.loss_curve.back(), 0.1);
}

TEST(TrainAutoencoderTest, ZeroLearningRateKeepsLossConstant) {
  const Corpus c = testing::SmallCorpus(40);
  AutoencoderConfig config;
  config.epochs = 3;
  config.learning_rate = 0.0;
  const AutoencoderResult r = TrainAutoencoder(c, config);
  ASSERT_EQ(r.loss_curve.size(), 3u);
  EXPECT_EQ(r.loss_curve[0], r.loss_curve[1]);
  EXPECT_EQ(r.loss_curve[1], r.loss_curve[2]);
  EXPECT_EQ(Flatten(r.params), Flatten(InitAutoencoder(c.vocab.size(), 16, 16, 1)));
}

TEST(TrainAutoencoderTest, DeterministicAndBounded) {
  const Corpus c = testing::SmallCorpus(40);
  AutoencoderConfig config;
  config.epochs = 2;
  const AutoencoderResult a = TrainAutoencoder(c, config);
  const AutoencoderResult b = TrainAutoencoder(c, config);
  EXPECT_EQ(Flatten(a.params), Flatten(b.params));
  EXPECT_EQ(a.loss_curve, b.loss_curve);
  for (const auto& z : EncodeAll(c, a.params.encoder)) EXPECT_TRUE(z.WithinBound());
}

TEST(TrainAutoencoderTest, SmoothedLossIsNearlyMonotone) {
  SyntheticSpec spec;
  spec.num_docs = 300;
  const Corpus c = GenerateSyntheticCorpus(spec);
  AutoencoderConfig config;
  config.epochs = 10;
  const AutoencoderResult r = TrainAutoencoder(c, config);
  // Three-epoch moving average must never rise by more than 5%.
  std::vector<double> smooth;
  for (size_t i = 2; i < r.loss_curve.size(); ++i) {
    smooth.push_back((r.loss_curve[i - 2] + r.loss_curve[i - 1] + r.loss_curve[i]) / 3);
  }
  for (size_t i = 1; i < smooth.size(); ++i) EXPECT_LE(smooth[i], smooth[i - 1] * 1.05);
  EXPECT_LT(r.loss_curve.back(), r.loss_curve.front());
}

TEST(DecodeTest, MaxLenOneAndDeterminism) {
  const AutoencoderParams p = InitAutoencoder(10, 3, 4, 2);
  LatentRepresentation z{Vector::Constant(4, 0.3)};
  EXPECT_EQ(Decode(z, p.decoder, 1).size(), 1u);
  EXPECT_EQ(Decode(z, p.decoder, 15), Decode(z, p.decoder, 15));
  EXPECT_LE(Decode(z, p.decoder, 15).size(), 15u);
  EXPECT_DPTEXT_ERROR(Decode(z, p.decoder, 0), ErrorCode::kInvalidArgument);
}

TEST(AutoencoderConfigTest, ParseAndRejectUnknownKeys) {
  const AutoencoderConfig c = ParseAutoencoderConfig("epochs=3\nlatent_dim=8\n");
  EXPECT_EQ(c.epochs, 3);
  EXPECT_EQ(c.latent_dim, 8);
  EXPECT_EQ(FormatAutoencoderConfig(ParseAutoencoderConfig(FormatAutoencoderConfig(c))),
            FormatAutoencoderConfig(c));
  EXPECT_DPTEXT_ERROR(ParseAutoencoderConfig("epoch=3\n"), ErrorCode::kInvalidArgument);
  EXPECT_DPTEXT_ERROR(ParseAutoencoderConfig("latent_dim=0\n"), ErrorCode::kInvalidArgument);
}

TEST(AutoencoderCheckpointTest, RoundTrip) {
  const AutoencoderParams p = InitAutoencoder(10, 3, 4, 2);
  AutoencoderConfig config;
  const Checkpoint ckpt = ParseCheckpoint(SerializeCheckpoint(AutoencoderCheckpoint(p, config)));
  EXPECT_EQ(Flatten(AutoencoderFromCheckpoint(ckpt)), Flatten(p));
  Checkpoint wrong = ckpt;
  wrong.kind = "dptext";
  EXPECT_DPTEXT_ERROR(AutoencoderFromCheckpoint(wrong), ErrorCode::kIntegrity);
}

// Independent bidirectional pass built on the scalar GRU step.
std::vector<std::vector<double>> ScalarTagger(const std::vector<int>& tokens,
                                              const TaggerParams& p) {
  const size_t m = tokens.size();
  const int h = p.hidden_dim();
  std::vector<std::vector<double>> fwd(m), bwd(m);
  std::vector<double> s(h, 0.0);
  for (size_t i = 0; i < m; ++i) fwd[i] = s = ScalarGruStep(EmbeddingOf(p.embedding, tokens[i]), s, p.forward);
  s.assign(h, 0.0);
  for (size_t i = m; i-- > 0;) bwd[i] = s = ScalarGruStep(EmbeddingOf(p.embedding, tokens[i]), s, p.backward);
  std::vector<std::vector<double>> out(m);
  for (size_t i = 0; i < m; ++i) {
    std::vector<double> joint = fwd[i];
    joint.insert(joint.end(), bwd[i].begin(), bwd[i].end());
    std::vector<double> proj(p.phi.rows());
    for (Eigen::Index a = 0; a < p.phi.rows(); ++a) {
      proj[a] = p.phi_bias[a];
      for (size_t b = 0; b < joint.size(); ++b) proj[a] += p.phi(a, b) * joint[b];
    }
    std::vector<double> logits(p.num_tags());
    double mx = -1e300;
    for (int k = 0; k < p.num_tags(); ++k) {
      logits[k] = p.output_bias[k];
      for (size_t a = 0; a < proj.size(); ++a) logits[k] += p.output(k, a) * proj[a];
      mx = std::max(mx, logits[k]);
    }
    double z = 0.0;
    for (double& l : logits) z += (l = std::exp(l - mx));
    for (double& l : logits) l /= z;
    out[i] = logits;
  }
  return out;
}

TEST(TaggerTest, MatchesIndependentImplementation) {
  const TaggerParams p = InitTagger(9, 3, 4, 5, 3, 21, 0.7);
  const std::vector<int> tokens = {3, 8, 2, 2, 6};
  const TaggerTrace trace = TaggerForward(tokens, p);
  const auto want = ScalarTagger(tokens, p);
  for (size_t i = 0; i < tokens.size(); ++i) {
    EXPECT_NEAR(trace.probs[i].sum(), 1.0, 1e-12);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(trace.probs[i][k], want[i][k], 1e-12);
  }
}

TEST(TaggerTest, LengthOneUsesZeroTerminalStates) {
  const TaggerParams p = InitTagger(9, 3, 4, 5, 3, 22, 0.7);
  const std::vector<int> tokens = {5};
  const TaggerTrace trace = TaggerForward(tokens, p);
  const Vector x = p.embedding.col(5);
  EXPECT_EQ(trace.forward_states[0], GruStep(x, Vector::Zero(4), p.forward));
  EXPECT_EQ(trace.backward_states[0], GruStep(x, Vector::Zero(4), p.backward));
  EXPECT_EQ(trace.doc_rep.size(), 8);
  EXPECT_EQ(trace.doc_rep.head(4), trace.forward_states[0]);
  EXPECT_EQ(trace.doc_rep.tail(4), trace.backward_states[0]);
}

TEST(TaggerTest, EmptyDocument) {
  const TaggerParams p = InitTagger(9, 3, 4, 5, 3, 22);
  Document doc;
  EXPECT_DPTEXT_ERROR(TagSequence(doc, p), ErrorCode::kEmptyDocument);
}

TEST(TaggerTest, BackwardMatchesFiniteDifferences) {
  RngStream rng(9, 0);
  for (uint64_t seed = 1; seed <= 4; ++seed) {
    const TaggerParams p = InitTagger(6, 3, 3, 4, 3, seed, 0.6);
    const std::vector<int> tokens = {1, 4, 5, 2};
    std::vector<Vector> w(tokens.size());
    for (auto& v : w) v = RandomVector(3, 1.0, rng);
    const Vector wr = RandomVector(6, 1.0, rng);
    // L = sum_i w_i . log p_i + wr . doc_rep; dL/dlogits_i = w_i - p_i * sum(w_i).
    auto loss = [&](const TaggerParams& q) {
      const TaggerTrace t = TaggerForward(tokens, q);
      double s = wr.dot(t.doc_rep);
      for (size_t i = 0; i < tokens.size(); ++i) {
        s += w[i].dot(t.probs[i].array().log().matrix());
      }
      return s;
    };
    const TaggerTrace trace = TaggerForward(tokens, p);
    std::vector<Vector> d_logits;
    for (size_t i = 0; i < tokens.size(); ++i) {
      d_logits.push_back(w[i] - trace.probs[i] * w[i].sum());
    }
    TaggerParams grad = ZerosLike(p);
    TaggerBackward(trace, tokens, d_logits, &wr, p, grad);
    EXPECT_TRUE(GradientsMatch(Flatten(grad), NumericParamGrad(p, loss), kGradTol));
  }
}

}  // namespace
}  // namespace dptext
