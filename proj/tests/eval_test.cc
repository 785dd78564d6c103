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

#include "dptext/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dptext {
namespace {

using ::testing::HasSubstr;
using ::testing::StartsWith;
using testing::SmallCorpus;

TEST(AccuracyTest, Examples) {
  EXPECT_DOUBLE_EQ(Accuracy(std::vector<int>{0, 1, 1}, std::vector<int>{0, 1, 0}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(Accuracy(std::vector<int>{2, 1}, std::vector<int>{2, 1}), 1.0);
  EXPECT_DOUBLE_EQ(Accuracy(std::vector<int>{0, 0}, std::vector<int>{1, 1}), 0.0);
  EXPECT_DPTEXT_ERROR(Accuracy(std::vector<int>{0}, std::vector<int>{0, 1}),
                      ErrorCode::kLengthMismatch);
}

TEST(MacroF1Test, ClosedForms) {
  const std::vector<int> balanced = {0, 1, 0, 1};
  EXPECT_DOUBLE_EQ(MacroF1(balanced, balanced, 2), 1.0);
  EXPECT_DOUBLE_EQ(MacroF1(std::vector<int>{0, 0, 0, 0}, balanced, 2), 1.0 / 3.0);
  EXPECT_DPTEXT_ERROR(MacroF1(std::vector<int>{0, 2}, std::vector<int>{0, 1}, 2),
                      ErrorCode::kIndex);
  EXPECT_DPTEXT_ERROR(MacroF1(std::vector<int>{0}, balanced, 2),
                      ErrorCode::kLengthMismatch);
}

TEST(MacroF1Test, MatchesConfusionMatrixByHand) {
  // Confusion [true][pred]:
  //   0: 2 1 0      P0 = 2/3  R0 = 2/3  F0 = 2/3
  //   1: 1 1 1      P1 = 1/3  R1 = 1/3  F1 = 1/3
  //   2: 0 1 2      P2 = 2/3  R2 = 2/3  F2 = 2/3
  const std::vector<int> labels = {0, 0, 0, 1, 1, 1, 2, 2, 2};
  const std::vector<int> preds = {0, 0, 1, 0, 1, 2, 1, 2, 2};
  EXPECT_NEAR(MacroF1(preds, labels, 3), (2.0 / 3 + 1.0 / 3 + 2.0 / 3) / 3, 1e-15);
  // A class absent from both sides contributes F1 = 0.
  EXPECT_NEAR(MacroF1(preds, labels, 4), (2.0 / 3 + 1.0 / 3 + 2.0 / 3) / 4, 1e-15);
}

TEST(MajorityClassTest, TiesGoToLowestIndex) {
  EXPECT_EQ(MajorityClass(std::vector<int>{1, 2, 2, 1}, 3), 1);
  EXPECT_EQ(MajorityClass(std::vector<int>{2, 2, 0}, 3), 2);
}

TEST(ProbeConfigTest, RoundTrip) {
  ProbeConfig c;
  c.hidden = 0;
  c.learning_rate = 0.003;
  c.seed = 9;
  EXPECT_EQ(FormatProbeConfig(ParseProbeConfig(FormatProbeConfig(c))),
            FormatProbeConfig(c));
  EXPECT_DPTEXT_ERROR(ParseProbeConfig("width=3\n"), ErrorCode::kInvalidArgument);
}

TEST(FitProbeTest, SeparatesLinearData) {
  RngStream rng(1, 0);
  std::vector<Vector> xs;
  std::vector<int> ys;
  for (int i = 0; i < 300; ++i) {
    Vector x(2);
    FillUniform(x, 1.0, rng);
    xs.push_back(x);
    ys.push_back(x[0] + 0.5 * x[1] > 0.1 ? 1 : 0);
  }
  ProbeConfig config;
  config.hidden = 0;
  config.learning_rate = 0.05;
  config.max_epochs = 200;
  const Probe probe = FitProbe(xs, ys, 2, config);
  int correct = 0;
  for (size_t i = 0; i < xs.size(); ++i) correct += probe.Predict(xs[i]) == ys[i];
  EXPECT_GE(correct / 300.0, 0.97);
}

ReleasedSet ConstantNoiseRelease(const Corpus& corpus, uint64_t seed) {
  // Every document maps to the same vector, so the release is pure noise.
  const std::vector<LatentRepresentation> z(corpus.size(), {Vector::Zero(16)});
  return ReleaseCorpus(corpus, z, ReleaseMethod::kDifPriv, 1e-3, 1e-3, seed);
}

double MajorityF1(const Corpus& corpus, int attr) {
  const int card = corpus.schema.attributes[attr].cardinality;
  std::vector<int> train, test;
  for (const auto& d : corpus.documents) {
    (d.split == Split::kTrain ? train : test).push_back(d.attributes[attr]);
  }
  const int majority = MajorityClass(train, card);
  return MacroF1(std::vector<int>(test.size(), majority), test, card);
}

TEST(RunAttackTest, PureNoiseMatchesMajorityPrediction) {
  SyntheticSpec spec;
  spec.num_docs = 1000;
  spec.attributes = {{"gender", 2, 0.0, {0.8, 0.2}}};
  spec.seed = 3;
  const Corpus corpus = GenerateSyntheticCorpus(spec);
  const AttackResult r =
      RunAttack(ConstantNoiseRelease(corpus, 4), corpus, "gender", ProbeConfig{});
  EXPECT_NEAR(r.macro_f1, MajorityF1(corpus, 0), 0.03);
}

TEST(RunAttackTest, RecoversPlantedAttributeFromOriginal) {
  std::vector<double> f1s;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    SyntheticSpec spec;
    spec.seed = seed;
    const Corpus corpus = GenerateSyntheticCorpus(spec);
    AutoencoderConfig ae;
    ae.seed = seed;
    const EncoderParams encoder = TrainAutoencoder(corpus, ae).params.encoder;
    const auto z = EncodeAll(corpus, encoder);
    const ReleasedSet release =
        ReleaseCorpus(corpus, z, ReleaseMethod::kOriginal, 0.0, 1e-3, seed);
    ProbeConfig probe;
    probe.seed = seed;
    f1s.push_back(RunAttack(release, corpus, "gender", probe).macro_f1);
  }
  std::nth_element(f1s.begin(), f1s.begin() + 2, f1s.end());
  EXPECT_GE(f1s[2], 0.75);
}

TEST(RunAttackTest, DeterministicAndWellFormed) {
  const Corpus corpus = SmallCorpus(120);
  const auto z = EncodeAll(corpus, InitAutoencoder(corpus.vocab.size(), 4, 4, 1, 0.5).encoder);
  const ReleasedSet release =
      ReleaseCorpus(corpus, z, ReleaseMethod::kDifPriv, 0.1, 1e-3, 2);
  const AttackResult a = RunAttack(release, corpus, "age", ProbeConfig{});
  const AttackResult b = RunAttack(release, corpus, "age", ProbeConfig{});
  EXPECT_EQ(a.macro_f1, b.macro_f1);
  EXPECT_GE(a.macro_f1, 0.0);
  EXPECT_LE(a.macro_f1, 1.0);
  ASSERT_EQ(a.confusion.size(), 3u);
  int64_t total = 0;
  for (const auto& row : a.confusion) for (int64_t c : row) total += c;
  EXPECT_EQ(total, a.test_size);
  EXPECT_EQ(a.train_size + a.test_size, corpus.size());
  EXPECT_DPTEXT_ERROR(RunAttack(release, corpus, "zip", ProbeConfig{}),
                      ErrorCode::kSchema);
}

TEST(SplitReleaseTest, FollowsCorpusSplits) {
  const Corpus corpus = SmallCorpus(50);
  const std::vector<LatentRepresentation> z(corpus.size(), {Vector::Zero(2)});
  ReleasedSet release = ReleaseCorpus(corpus, z, ReleaseMethod::kOriginal, 0, 1e-3, 1);
  // Row order must not matter.
  std::reverse(release.ids.begin(), release.ids.end());
  const ReleaseSplit split = SplitRelease(release, corpus);
  for (int d : split.train_docs) EXPECT_EQ(corpus.documents[d].split, Split::kTrain);
  for (int d : split.test_docs) EXPECT_EQ(corpus.documents[d].split, Split::kTest);
  EXPECT_EQ(split.train_docs.size(), corpus.IndicesFor(Split::kTrain).size());
  EXPECT_EQ(split.test_docs.size(), corpus.IndicesFor(Split::kTest).size());

  release.ids[0] = "stranger";
  EXPECT_DPTEXT_ERROR(SplitRelease(release, corpus), ErrorCode::kSchema);
  release.ids[0] = release.ids[1];
  EXPECT_DPTEXT_ERROR(SplitRelease(release, corpus), ErrorCode::kSchema);
}

TEST(TaggingAccuracyTest, ConstantTaggerScoresTagFrequency) {
  const Corpus corpus = SmallCorpus(40);
  TaggerParams tagger = InitTagger(corpus.vocab.size(), 2, 2, 2, 3, 1);
  tagger.output.setZero();
  tagger.output_bias << 0.0, 0.0, 5.0;
  int64_t hits = 0, total = 0;
  for (const auto& d : corpus.documents) {
    if (d.split != Split::kTest) continue;
    for (int t : d.tags) {
      hits += t == kTagAttribute;
      ++total;
    }
  }
  EXPECT_DOUBLE_EQ(TaggingAccuracy(corpus, tagger, Split::kTest),
                   static_cast<double>(hits) / total);
}

EvalRow Row(const std::string& method, uint64_t seed, std::optional<double> alpha) {
  EvalRow r;
  r.method = method;
  r.seed = seed;
  r.alpha = alpha;
  r.epsilon_used = method == "Original" ? std::numeric_limits<double>::infinity() : 0.1;
  r.utility = 0.5;
  r.attacker_f1 = {0.25, 0.125};
  r.train_size = 8;
  r.test_size = 2;
  if (method != "Original") {
    AuditReport audit;
    audit.pass = true;
    audit.max_abs_log_ratio = 0.09;
    audit.slack_at_max = 0.01;
    r.audit = audit;
  }
  return r;
}

TEST(FormatReportCsvTest, ColumnsOrderAndMarkers) {
  EvalReport report;
  report.attributes = {"gender", "age"};
  report.rows = {Row("DPText", 2, 1.0), Row("DifPriv", 1, std::nullopt),
                 Row("Original", 2, std::nullopt), Row("DPText{age}", 1, 1.0),
                 Row("Original", 1, std::nullopt), Row("DPText", 1, 1.0)};
  const std::string csv = FormatReportCsv(report);
  EXPECT_EQ(csv,
            "method,alpha,seed,epsilon_used,utility,f1_gender,f1_age,n_train,"
            "n_test,audit,audit_max_log_ratio,audit_slack,release\n"
            "Original,na,1,inf,0.5,0.25,0.125,8,2,na,na,na,\n"
            "Original,na,2,inf,0.5,0.25,0.125,8,2,na,na,na,\n"
            "DifPriv,na,1,0.1,0.5,0.25,0.125,8,2,pass,0.09,0.01,\n"
            "DPText,1,1,0.1,0.5,0.25,0.125,8,2,pass,0.09,0.01,\n"
            "DPText,1,2,0.1,0.5,0.25,0.125,8,2,pass,0.09,0.01,\n"
            "DPText{age},1,1,0.1,0.5,0.25,0.125,8,2,pass,0.09,0.01,\n");
  std::reverse(report.rows.begin(), report.rows.end());
  EXPECT_EQ(FormatReportCsv(report), csv);
  report.rows[0].attacker_f1.pop_back();
  EXPECT_DPTEXT_ERROR(FormatReportCsv(report), ErrorCode::kSchema);
}

BaselineConfig FastBaselines() {
  BaselineConfig config;
  config.train.epochs = 2;
  config.probe.max_epochs = 10;
  config.audit_config.trials = 20'000;
  config.audit_config.min_expected_count = 50.0;
  return config;
}

TEST(RunBaselinesTest, ProducesOneRowPerMethod) {
  const Corpus corpus = SmallCorpus(120);
  const EncoderParams encoder = InitAutoencoder(corpus.vocab.size(), 4, 4, 1, 0.5).encoder;
  BaselineConfig config = FastBaselines();
  config.variants = {{"age"}};
  const std::vector<EvalRow> rows = RunBaselines(corpus, encoder, config, 3);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].method, "Original");
  EXPECT_TRUE(std::isinf(rows[0].epsilon_used));
  EXPECT_FALSE(rows[0].audit.has_value());
  EXPECT_EQ(rows[1].method, "DifPriv");
  EXPECT_DOUBLE_EQ(rows[1].epsilon_used, config.train.c1);
  EXPECT_EQ(rows[2].method, "DPText");
  EXPECT_LE(rows[2].epsilon_used, config.train.c1);
  EXPECT_EQ(rows[3].method, "DPText{age}");
  for (const auto& row : rows) {
    EXPECT_GE(row.utility, 0.0);
    EXPECT_LE(row.utility, 1.0);
    ASSERT_EQ(row.attacker_f1.size(), 2u);
    for (double f : row.attacker_f1) {
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
    }
    if (row.method != "Original") EXPECT_TRUE(row.audit.has_value());
  }
  EvalReport report{AttributeNames(corpus.schema), rows};
  const EvalReport again{AttributeNames(corpus.schema),
                         RunBaselines(corpus, encoder, config, 3)};
  EXPECT_EQ(FormatReportCsv(report), FormatReportCsv(again));

  config.train.task = Task::kTag;
  EXPECT_DPTEXT_ERROR(RunBaselines(corpus, encoder, config, 3),
                      ErrorCode::kInvalidArgument);
}

TEST(AlphaSweepTest, OneRowPerCellAndProjectedBudget) {
  const Corpus corpus = SmallCorpus(80);
  const EncoderParams encoder = InitAutoencoder(corpus.vocab.size(), 4, 3, 1, 0.5).encoder;
  const std::vector<double> alphas = {0.0, 1.0, 4.0};
  const std::vector<uint64_t> seeds = {1, 2};
  const std::vector<SweepRow> rows =
      AlphaSweep(corpus, encoder, FastBaselines(), alphas, seeds);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) EXPECT_LE(r.eps_tilde, 0.1);
  const std::vector<std::string> names = AttributeNames(corpus.schema);
  const std::string csv = FormatSweepCsv(names, rows);
  EXPECT_THAT(csv, StartsWith("alpha,seed,utility,f1_gender,f1_age,eps_tilde\n"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_THAT(csv, HasSubstr("\n0,1,"));
}

}  // namespace
}  // namespace dptext
