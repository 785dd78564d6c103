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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dptext/corpus.h"
#include "dptext/discriminators.h"
#include "dptext/encoder.h"
#include "dptext/eval.h"
#include "dptext/noise.h"
#include "dptext/numerics.h"
#include "dptext/trainer.h"

namespace dptext {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr int kSeeds = 5;
constexpr int kSweepSeeds = 3;
constexpr double kGradTol = 1e-5;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string Fmt(double v, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << v;
  return out.str();
}

class Reporter {
 public:
  void Record(int criterion, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": "
              << detail << std::endl;
    if (!pass) ++failures_;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

// 1. Mechanism audit.
void AuditCriterion(Reporter& r) {
  const int dim = 2;
  const double delta = Sensitivity(dim);
  AuditConfig config;
  config.trials = 1'000'000;
  std::ostringstream detail;
  bool ok = delta == 4.0;
  double slowest = 0.0;
  for (double eps : {0.1, 0.5}) {
    const auto start = Clock::now();
    const AuditReport good = AuditDp(eps, delta, dim, Vector::Ones(dim),
                                     -Vector::Ones(dim), config);
    slowest = std::max(slowest, Seconds(start));
    const auto start_bad = Clock::now();
    const AuditReport bad =
        AuditDp(eps, delta, dim, Vector::Ones(dim), -Vector::Ones(dim), config,
                LaplaceMechanism(delta / (10.0 * eps)));
    slowest = std::max(slowest, Seconds(start_bad));
    ok = ok && good.pass && !bad.pass;
    detail << "eps=" << eps << " correct " << (good.pass ? "pass" : "fail")
           << " (max|log ratio| " << Fmt(good.max_abs_log_ratio) << ")"
           << ", mis-scaled " << (bad.pass ? "pass" : "fail") << "; ";
  }
  ok = ok && slowest < 120.0;
  detail << "slowest audit " << Fmt(slowest, 3) << " s";
  r.Record(1, ok, detail.str());
}

double LaplaceCdf(double x, double b) {
  return x < 0.0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
}

// 2. Sampler correctness.
void SamplerCriterion(Reporter& r) {
  const int n = 10'000;
  const double critical = 1.628 / std::sqrt(static_cast<double>(n));
  std::ostringstream detail;
  bool ok = true;
  const std::vector<std::pair<double, double>> settings = {
      {0.1, 4.0}, {0.5, 32.0}, {1.0, 2.0}};
  uint64_t stream = 0;
  for (const auto& [eps, delta] : settings) {
    RngStream rng(2026, stream++);
    std::vector<double> xs(n);
    for (double& x : xs) x = ReparamNoise(DrawCenteredUniform(rng), eps, delta);
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      const double f = LaplaceCdf(xs[i], delta / eps);
      d = std::max({d, (i + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    ok = ok && d < critical;
    detail << "(eps=" << eps << ", delta=" << delta << ") D=" << Fmt(d) << "; ";
  }
  detail << "critical " << Fmt(critical);
  r.Record(2, ok, detail.str());
}

// 3. Reparameterization closed forms.
void ClosedFormCriterion(Reporter& r) {
  bool ok = ReparamNoise(0.0, 0.3, 2.0) == 0.0;
  ok = ok && std::abs(ReparamNoise(0.25, 1.0, 1.0) - std::log(2.0)) <= 1e-12;
  ok = ok && std::abs(ReparamNoise(-0.25, 1.0, 1.0) + std::log(2.0)) <= 1e-12;
  RngStream rng(3, 0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double u = DrawCenteredUniform(rng);
    const double eps = 1e-3 + 5.0 * rng.NextUniform();
    const double delta = 0.5 + 64.0 * rng.NextUniform();
    const double s = ReparamNoise(u, eps, delta);
    // Scaled so that 1e-12 is meaningful at double precision when s/eps
    // reaches 1e8.
    worst = std::max(worst, std::abs(NoiseGradEps(u, eps, delta) + s / eps) /
                                std::max(1.0, std::abs(s / eps)));
  }
  ok = ok && worst <= 1e-12;
  r.Record(3, ok,
           "s(0)=0, s(+-0.25)=+-ln 2; max |ds/deps + s/eps| / max(1, |s/eps|) "
           "over 1000 draws = " + Fmt(worst));
}

// Gradient comparison shared by criterion 4.
struct GradCheck {
  std::string name;
  double worst = 0.0;
};

double WorstRelative(const Vector& analytic, const Vector& numeric) {
  if (analytic.size() != numeric.size()) return INFINITY;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double scale =
        std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-3});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
  }
  return worst;
}

template <typename P, typename Fn>
Vector ParamFd(const P& params, Fn&& f) {
  return FiniteDiffGrad(
      [&](const Vector& flat) {
        P p = params;
        Unflatten(flat, p);
        return f(p);
      },
      Flatten(params), 1e-6);
}

Vector RandomVector(int n, double scale, RngStream& rng) {
  Vector v(n);
  FillUniform(v, scale, rng);
  return v;
}

std::vector<GradCheck> RunGradientSuite() {
  std::vector<GradCheck> out;
  RngStream rng(44, 0);

  {  // GRU step.
    GruParams p = GruParams::Zeros(3, 4);
    ForEachParam(p, [&](std::string_view, auto& t) { FillUniform(t, 0.7, rng); });
    const Vector x = RandomVector(3, 1.0, rng);
    const Vector h = RandomVector(4, 0.9, rng);
    const Vector w = RandomVector(4, 1.0, rng);
    GruStepCache cache;
    GruStep(x, h, p, &cache);
    GruParams grad = GruParams::Zeros(3, 4);
    Vector dx, dh;
    GruStepBackward(cache, w, p, grad, &dx, &dh);
    double worst = WorstRelative(
        Flatten(grad), ParamFd(p, [&](const GruParams& q) { return w.dot(GruStep(x, h, q)); }));
    worst = std::max(worst, WorstRelative(dx, FiniteDiffGrad(
        [&](const Vector& v) { return w.dot(GruStep(v, h, p)); }, x, 1e-6)));
    worst = std::max(worst, WorstRelative(dh, FiniteDiffGrad(
        [&](const Vector& v) { return w.dot(GruStep(x, v, p)); }, h, 1e-6)));
    out.push_back({"GRU step", worst});
  }

  const std::vector<int> tokens = {2, 5, 3, 7, 4};
  {  // Encoder.
    const EncoderParams enc = InitAutoencoder(8, 3, 4, 5, 0.6).encoder;
    const Vector w = RandomVector(4, 1.0, rng);
    const EncodeTrace trace = EncodeWithTrace(tokens, enc);
    EncoderParams grad = ZerosLike(enc);
    EncodeBackward(trace, tokens, w, enc, grad);
    out.push_back({"encoder", WorstRelative(Flatten(grad), ParamFd(enc, [&](const EncoderParams& q) {
                     return w.dot(Encode(tokens, q).values);
                   }))});
  }
  {  // Autoencoder reconstruction loss.
    const AutoencoderParams ae = InitAutoencoder(8, 3, 4, 6, 0.6);
    AutoencoderParams grad = ZerosLike(ae);
    ReconstructionLoss(tokens, ae, &grad);
    out.push_back({"reconstruction loss",
                   WorstRelative(Flatten(grad), ParamFd(ae, [&](const AutoencoderParams& q) {
                     return ReconstructionLoss(tokens, q);
                   }))});
  }
  {  // Classifier head with a hidden layer.
    const DenseHead head = InitDenseHead(5, 4, 3, rng, 0.8);
    const Vector x = RandomVector(5, 1.0, rng);
    HeadCache cache;
    const Vector probs = Classify(x, head, &cache);
    DenseHead grad = ZerosLike(head);
    Vector dx;
    HeadBackward(cache, SoftmaxCrossEntropyGrad(probs, 1), head, grad, &dx);
    double worst = WorstRelative(Flatten(grad), ParamFd(head, [&](const DenseHead& h) {
      return CrossEntropy(Classify(x, h), 1);
    }));
    worst = std::max(worst, WorstRelative(dx, FiniteDiffGrad(
        [&](const Vector& v) { return CrossEntropy(Classify(v, head), 1); }, x, 1e-6)));
    out.push_back({"classifier", worst});
  }
  {  // Tagger.
    const TaggerParams tagger = InitTagger(8, 3, 3, 4, 3, 9, 0.7);
    Document d1, d2;
    d1.tokens = {2, 5, 3};
    d1.tags = {0, 2, 1};
    d2.tokens = {7, 4};
    d2.tags = {1, 1};
    const std::vector<const Document*> docs = {&d1, &d2};
    const TaggingLossResult res = TaggingLoss(docs, tagger);
    out.push_back({"tagger", WorstRelative(Flatten(res.grad), ParamFd(tagger, [&](const TaggerParams& q) {
                     return TaggingLoss(docs, q).value;
                   }))});
  }

  // Losses and the budget gradient with frozen draws.
  const int dim = 4;
  std::vector<Vector> latents;
  std::vector<int> labels;
  std::vector<std::vector<int>> attrs(2);
  for (int b = 0; b < 5; ++b) {
    latents.push_back(RandomVector(dim, 1.0, rng));
    labels.push_back(rng.NextInt(2));
    attrs[0].push_back(rng.NextInt(2));
    attrs[1].push_back(rng.NextInt(3));
  }
  const UniformDraws draws = UniformDraws::Sample(5, 3, dim, rng);
  const auto spec_at = [&](double eps) {
    return NoiseSpec::ForDimension(dim, eps, 10.0, 3);
  };
  const double eps = 2.5;
  {
    const DenseHead head = InitDenseHead(dim, 3, 2, rng, 0.6);
    const SemanticLossResult res = SemanticLoss(latents, labels, head, spec_at(eps), draws);
    double worst = WorstRelative(Flatten(res.head_grad), ParamFd(head, [&](const DenseHead& h) {
      return SemanticLoss(latents, labels, h, spec_at(eps), draws).value;
    }));
    worst = std::max(worst, WorstRelative(Vector::Constant(1, res.eps_grad), FiniteDiffGrad(
        [&](const Vector& e) { return SemanticLoss(latents, labels, head, spec_at(e[0]), draws).value; },
        Vector::Constant(1, eps), 1e-6)));
    out.push_back({"semantic loss incl. d/deps", worst});
  }
  {
    const std::vector<DenseHead> heads = {InitDenseHead(dim, 3, 2, rng, 0.6),
                                          InitDenseHead(dim, 0, 3, rng, 0.6)};
    const AttributeLossResult res = AttributeLoss(latents, attrs, heads, spec_at(eps), draws);
    double worst = WorstRelative(Vector::Constant(1, res.eps_grad), FiniteDiffGrad(
        [&](const Vector& e) { return AttributeLoss(latents, attrs, heads, spec_at(e[0]), draws).value; },
        Vector::Constant(1, eps), 1e-6));
    for (size_t t = 0; t < heads.size(); ++t) {
      worst = std::max(worst, WorstRelative(Flatten(res.head_grads[t]), ParamFd(heads[t], [&](const DenseHead& h) {
        std::vector<DenseHead> hs = heads;
        hs[t] = h;
        return AttributeLoss(latents, attrs, hs, spec_at(eps), draws).value;
      })));
    }
    out.push_back({"attribute loss incl. d/deps", worst});
  }
  {  // Full defender objective for both tasks.
    SyntheticSpec spec;
    spec.num_docs = 20;
    spec.vocab_size = 12;
    spec.min_length = 2;
    spec.max_length = 4;
    const Corpus corpus = GenerateSyntheticCorpus(spec);
    const EncoderParams enc = InitAutoencoder(corpus.vocab.size(), 3, 4, 2, 0.6).encoder;
    std::vector<Vector> zs;
    for (auto& z : EncodeAll(corpus, enc)) zs.push_back(z.values);
    for (Task task : {Task::kClassify, Task::kTag}) {
      TrainConfig config;
      config.task = task;
      config.c1 = 10.0;
      config.eps_init = 3.0;
      config.samples = 2;
      config.attribute_hidden = 2;
      config.semantic_hidden = 2;
      config.tagger_embed_dim = 2;
      config.tagger_hidden_dim = 2;
      config.tagger_proj_dim = 2;
      const TrainState state = InitTrainState(corpus, 4, config);
      const std::vector<int> idx = {0, 1, 2};
      const TrainBatch batch = MakeBatch(corpus, idx, zs, state);
      const UniformDraws d = UniformDraws::ForDocuments(idx, 2, state.release_dim(), 1, 0);
      const DefenderEval ev = EvaluateDefender(batch, state, config, d);
      auto objective = [&](const TrainState& s) {
        return EvaluateDefender(batch, s, config, d).objective;
      };
      double worst = WorstRelative(Vector::Constant(1, ev.eps_grad), FiniteDiffGrad(
          [&](const Vector& e) {
            TrainState s = state;
            s.epsilon = e[0];
            return objective(s);
          },
          Vector::Constant(1, state.epsilon), 1e-6));
      if (task == Task::kClassify) {
        worst = std::max(worst, WorstRelative(Flatten(ev.semantic_grad), ParamFd(state.semantic, [&](const DenseHead& h) {
          TrainState s = state;
          s.semantic = h;
          return objective(s);
        })));
      } else {
        worst = std::max(worst, WorstRelative(Flatten(ev.tagger_grad), ParamFd(state.tagger, [&](const TaggerParams& p) {
          TrainState s = state;
          s.tagger = p;
          return objective(s);
        })));
      }
      out.push_back({std::string("defender objective (") + std::string(TaskName(task)) + ")", worst});
    }
  }
  return out;
}

// 4. Gradient suite.
void GradientCriterion(Reporter& r) {
  const auto start = Clock::now();
  const std::vector<GradCheck> checks = RunGradientSuite();
  const double elapsed = Seconds(start);
  bool ok = elapsed < 60.0;
  std::ostringstream detail;
  for (const auto& c : checks) {
    ok = ok && c.worst <= kGradTol;
    detail << c.name << " " << Fmt(c.worst, 2) << "; ";
  }
  detail << "runtime " << Fmt(elapsed, 3) << " s";
  r.Record(4, ok, detail.str());
}

// 5. Sensitivity invariant.
void SensitivityCriterion(Reporter& r) {
  RngStream rng(5, 0);
  int violations = 0;
  for (int i = 0; i < 10'000; ++i) {
    const double scale = 0.01 + 4.0 * rng.NextUniform();
    const int latent = 1 + rng.NextInt(16);
    const EncoderParams enc = InitAutoencoder(30, 4, latent, 1000 + i, scale).encoder;
    std::vector<int> doc(1 + rng.NextInt(24));
    for (int& t : doc) t = kFirstTokenId + rng.NextInt(28);
    const LatentRepresentation z = Encode(doc, enc);
    if (!(z.values.cwiseAbs().maxCoeff() <= 1.0)) ++violations;
  }
  const bool sens = Sensitivity(1) == 2.0 && Sensitivity(16) == 32.0 &&
                    Sensitivity(64) == 128.0;
  r.Record(5, violations == 0 && sens,
           std::to_string(violations) + " out-of-bound latents in 10000 encoders; "
           "sensitivity(1,16,64) = " + Fmt(Sensitivity(1)) + "," +
           Fmt(Sensitivity(16)) + "," + Fmt(Sensitivity(64)));
}

struct SeedArtifacts {
  Corpus corpus;
  EncoderParams encoder;
};

SeedArtifacts Prepare(uint64_t seed) {
  SyntheticSpec spec;
  spec.seed = seed;
  SeedArtifacts a;
  a.corpus = GenerateSyntheticCorpus(spec);
  AutoencoderConfig ae;
  ae.seed = seed;
  a.encoder = TrainAutoencoder(a.corpus, ae).params.encoder;
  return a;
}

// 6. Constraint safety.
void ConstraintCriterion(Reporter& r, const SeedArtifacts& a) {
  TrainConfig config;
  const TrainResult result = TrainDpText(a.corpus, a.encoder, config);
  const auto& eps = result.state.history.epsilon;
  const auto [lo, hi] = std::minmax_element(eps.begin(), eps.end());
  const bool ok = !eps.empty() && *lo >= config.eps_floor && *hi <= config.c1;
  r.Record(6, ok,
           std::to_string(eps.size()) + " steps, epsilon in [" + Fmt(*lo) + ", " +
               Fmt(*hi) + "], bounds [" + Fmt(config.eps_floor) + ", " +
               Fmt(config.c1) + "]");
}

double MajorityRate(const Corpus& corpus) {
  std::vector<int> test;
  for (const auto& d : corpus.documents) {
    if (d.split == Split::kTest) test.push_back(d.label);
  }
  std::vector<int> train;
  for (const auto& d : corpus.documents) {
    if (d.split == Split::kTrain) train.push_back(d.label);
  }
  const int majority = MajorityClass(train, corpus.schema.num_classes);
  return static_cast<double>(std::count(test.begin(), test.end(), majority)) /
         test.size();
}

double MaxClassShare(const Corpus& corpus) {
  std::vector<int> counts(corpus.schema.num_classes, 0);
  for (const auto& d : corpus.documents) ++counts[d.label];
  return static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
         corpus.size();
}

// 7 and 8. Direction of effect over five seeds.
void DirectionCriteria(Reporter& r, const std::vector<SeedArtifacts>& seeds) {
  const auto start = Clock::now();
  BaselineConfig config;
  std::map<std::string, std::vector<double>> f1, utility;
  std::vector<double> majority, eps_tilde, share;
  for (size_t i = 0; i < seeds.size(); ++i) {
    const auto rows = RunBaselines(seeds[i].corpus, seeds[i].encoder, config, i + 1);
    for (const auto& row : rows) {
      f1[row.method].push_back(row.attacker_f1[0]);  // gender, signal 0.9
      utility[row.method].push_back(row.utility);
      if (row.method == "DPText") eps_tilde.push_back(row.epsilon_used);
    }
    majority.push_back(MajorityRate(seeds[i].corpus));
    share.push_back(MaxClassShare(seeds[i].corpus));
  }
  const double elapsed = Seconds(start);
  const double f_orig = Median(f1["Original"]);
  const double f_dp = Median(f1["DifPriv"]);
  const double f_dpt = Median(f1["DPText"]);
  const double c1 = config.train.c1;
  // Any classifier reading a single eps-DP release of one document has
  // accuracy at most e^eps times the largest class prior.
  const double bound = std::exp(c1) * Median(share);

  const bool ok7 = f_dpt <= f_dp - 0.05 && f_dp - 0.05 <= f_orig - 0.10 &&
                   elapsed < 600.0;
  r.Record(7, ok7,
           "median gender macro-F1: DPText " + Fmt(f_dpt) + ", DifPriv " +
               Fmt(f_dp) + ", Original " + Fmt(f_orig) +
               " (need DPText <= DifPriv - 0.05 <= Original - 0.10); median eps~ " +
               Fmt(Median(eps_tilde)) + "; runtime " + Fmt(elapsed, 3) +
               " s; eps-DP caps attacker accuracy on the released vectors at " +
               Fmt(bound) + " for both noisy methods");

  const double u_dpt = Median(utility["DPText"]);
  const double u_dp = Median(utility["DifPriv"]);
  const double u_major = Median(majority);
  const bool ok8 = u_dpt >= u_major + 0.10 && std::abs(u_dpt - u_dp) <= 0.10;
  r.Record(8, ok8,
           "median utility: DPText " + Fmt(u_dpt) + ", DifPriv " + Fmt(u_dp) +
               ", Original " + Fmt(Median(utility["Original"])) +
               ", majority " + Fmt(u_major) +
               " (need DPText >= majority + 0.10 and within 0.10 of DifPriv); "
               "eps-DP with eps <= " + Fmt(c1) + " caps accuracy at " + Fmt(bound));
}

// 9. Alpha sweep shape.
void SweepCriterion(Reporter& r, const std::vector<SeedArtifacts>& seeds) {
  const std::vector<double> alphas = {0.125, 0.25, 0.5, 1, 2, 4, 8, 16};
  BaselineConfig config;
  std::map<double, std::vector<double>> f1, utility;
  for (int s = 0; s < kSweepSeeds; ++s) {
    const std::vector<uint64_t> seed = {static_cast<uint64_t>(s + 1)};
    for (const auto& row : AlphaSweep(seeds[s].corpus, seeds[s].encoder, config, alphas, seed)) {
      f1[row.alpha].push_back(row.attacker_f1[0]);
      utility[row.alpha].push_back(row.utility);
    }
  }
  const double f_small = Median(f1[0.125]), f_one = Median(f1[1.0]);
  const double u_one = Median(utility[1.0]), u_big = Median(utility[16.0]);
  std::ostringstream grid;
  for (double a : alphas) {
    grid << a << ":" << Fmt(Median(f1[a]), 3) << "/" << Fmt(Median(utility[a]), 3) << " ";
  }
  r.Record(9, f_one <= f_small && u_big <= u_one,
           "median F1 alpha=1 " + Fmt(f_one) + " vs alpha=0.125 " + Fmt(f_small) +
               "; median utility alpha=16 " + Fmt(u_big) + " vs alpha=1 " +
               Fmt(u_one) + "; alpha:F1/utility " + grid.str());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 10. End-to-end determinism.
void DeterminismCriterion(Reporter& r) {
#if defined(DPTEXT_CLI_PATH) && defined(DPTEXT_PIPELINE_SCRIPT)
  const fs::path root = fs::temp_directory_path() / "dptext_acceptance_pipeline";
  fs::remove_all(root);
  std::vector<std::string> reports;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / ("run" + std::to_string(run));
    const std::string cmd = std::string("bash '") + DPTEXT_PIPELINE_SCRIPT + "' '" +
                            DPTEXT_CLI_PATH + "' '" + dir.string() + "' 1 2>/dev/null";
    if (std::system(cmd.c_str()) != 0) {
      r.Record(10, false, "pipeline run " + std::to_string(run + 1) + " failed");
      return;
    }
    reports.push_back(ReadFile(dir / "report.csv"));
  }
  fs::remove_all(root);
  const bool ok = !reports[0].empty() && reports[0] == reports[1];
  r.Record(10, ok, "two pipeline runs, report.csv " +
                       std::string(ok ? "byte-identical" : "differs") + " (" +
                       std::to_string(reports[0].size()) + " bytes)");
#else
  r.Record(10, false, "built without the command-line tool");
#endif
}

int Main() {
  Reporter r;
  AuditCriterion(r);
  SamplerCriterion(r);
  ClosedFormCriterion(r);
  GradientCriterion(r);
  SensitivityCriterion(r);
  std::vector<SeedArtifacts> seeds;
  for (int s = 1; s <= kSeeds; ++s) seeds.push_back(Prepare(s));
  ConstraintCriterion(r, seeds[0]);
  DirectionCriteria(r, seeds);
  SweepCriterion(r, seeds);
  DeterminismCriterion(r);
  std::cout << (r.failures() == 0 ? "all criteria passed"
                                  : std::to_string(r.failures()) + " criteria failed")
            << std::endl;
  return r.failures() == 0 ? 0 : 1;
}

}  // namespace
}  // namespace dptext

int main() { return dptext::Main(); }
