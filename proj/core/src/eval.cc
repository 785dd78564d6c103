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
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "key_value.h"

namespace dptext {

namespace {

constexpr uint64_t kStreamProbeInit = 701;
constexpr uint64_t kStreamProbeShuffle = 702;
constexpr uint64_t kStreamProbeHoldout = 703;

void CheckSameLength(size_t a, size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch,
                "predictions and labels differ in length (" +
                    std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

std::vector<int> Predict(const Probe& probe, std::span<const Vector> xs) {
  std::vector<int> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(probe.Predict(x));
  return out;
}

std::vector<int> AttributeLabels(const Corpus& corpus, std::span<const int> docs,
                                 int attr) {
  std::vector<int> out;
  out.reserve(docs.size());
  for (int i : docs) out.push_back(corpus.documents[i].attributes[attr]);
  return out;
}

std::vector<int> TaskLabels(const Corpus& corpus, std::span<const int> docs) {
  std::vector<int> out;
  out.reserve(docs.size());
  for (int i : docs) out.push_back(corpus.documents[i].label);
  return out;
}

std::string JoinVariant(const std::vector<std::string>& names) {
  std::string out = "DPText{";
  for (size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += "/";
    out += names[i];
  }
  return out + "}";
}

int MethodRank(const std::string& method) {
  if (method == "Original") return 0;
  if (method == "DifPriv") return 1;
  if (method == "DPText") return 2;
  return 3;
}

}  // namespace

double Accuracy(std::span<const int> predictions, std::span<const int> labels) {
  CheckSameLength(predictions.size(), labels.size());
  if (labels.empty()) {
    throw Error(ErrorCode::kLengthMismatch, "accuracy of an empty sequence");
  }
  size_t correct = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    correct += predictions[i] == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double MacroF1(std::span<const int> predictions, std::span<const int> labels,
               int num_classes) {
  CheckSameLength(predictions.size(), labels.size());
  if (num_classes < 1) {
    throw Error(ErrorCode::kInvalidArgument, "num_classes must be >= 1");
  }
  std::vector<int64_t> tp(num_classes, 0), fp(num_classes, 0),
      fn(num_classes, 0);
  for (size_t i = 0; i < labels.size(); ++i) {
    const int p = predictions[i];
    const int y = labels[i];
    if (p < 0 || p >= num_classes || y < 0 || y >= num_classes) {
      throw Error(ErrorCode::kIndex, "class outside [0, num_classes)");
    }
    if (p == y) {
      ++tp[y];
    } else {
      ++fp[p];
      ++fn[y];
    }
  }
  double sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    // 2PR / (P + R) == 2TP / (2TP + FP + FN), and is 0 when TP == 0.
    const double denom = 2.0 * tp[c] + fp[c] + fn[c];
    if (tp[c] > 0) sum += 2.0 * tp[c] / denom;
  }
  return sum / num_classes;
}

int MajorityClass(std::span<const int> labels, int num_classes) {
  std::vector<int64_t> counts(num_classes, 0);
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw Error(ErrorCode::kIndex, "class outside [0, num_classes)");
    }
    ++counts[y];
  }
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                          counts.begin());
}

ProbeConfig ParseProbeConfig(std::string_view text) {
  using namespace internal;
  constexpr ErrorCode kCode = ErrorCode::kInvalidArgument;
  ProbeConfig c;
  for (const auto& [key, value] : ParseKeyValues(text, kCode)) {
    if (key == "hidden") c.hidden = static_cast<int>(ParseInt(key, value, kCode));
    else if (key == "max_epochs") c.max_epochs = static_cast<int>(ParseInt(key, value, kCode));
    else if (key == "learning_rate") c.learning_rate = ParseDouble(key, value, kCode);
    else if (key == "batch_size") c.batch_size = static_cast<int>(ParseInt(key, value, kCode));
    else if (key == "tolerance") c.tolerance = ParseDouble(key, value, kCode);
    else if (key == "validation_fraction") c.validation_fraction = ParseDouble(key, value, kCode);
    else if (key == "patience") c.patience = static_cast<int>(ParseInt(key, value, kCode));
    else if (key == "seed") c.seed = ParseUint(key, value, kCode);
    else throw Error(kCode, "unknown probe config key '" + key + "'");
  }
  if (c.hidden < 0 || c.max_epochs < 1 || !(c.learning_rate > 0.0) ||
      c.batch_size < 1 || !(c.tolerance >= 0.0) ||
      !(c.validation_fraction >= 0.0 && c.validation_fraction < 1.0) ||
      c.patience < 1) {
    throw Error(kCode, "probe config out of range");
  }
  return c;
}

std::string FormatProbeConfig(const ProbeConfig& c) {
  using internal::FormatDouble;
  std::ostringstream out;
  out << "hidden=" << c.hidden << "\n"
      << "max_epochs=" << c.max_epochs << "\n"
      << "learning_rate=" << FormatDouble(c.learning_rate) << "\n"
      << "batch_size=" << c.batch_size << "\n"
      << "tolerance=" << FormatDouble(c.tolerance) << "\n"
      << "validation_fraction=" << FormatDouble(c.validation_fraction) << "\n"
      << "patience=" << c.patience << "\n"
      << "seed=" << c.seed << "\n";
  return out.str();
}

int Probe::Predict(const Vector& x) const {
  const Vector std_x = (x - mean).cwiseQuotient(stddev);
  return ArgMax(Classify(std_x, head));
}

Probe FitProbe(std::span<const Vector> features, std::span<const int> labels,
               int num_classes, const ProbeConfig& config) {
  CheckSameLength(features.size(), labels.size());
  if (features.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no training examples");
  }
  const int dim = static_cast<int>(features.front().size());
  const double n = static_cast<double>(features.size());
  Probe probe;
  probe.mean = Vector::Zero(dim);
  for (const auto& x : features) {
    CheckLength(x, dim, "probe feature");
    probe.mean += x / n;
  }
  probe.stddev = Vector::Zero(dim);
  for (const auto& x : features) {
    probe.stddev += (x - probe.mean).array().square().matrix() / n;
  }
  probe.stddev = probe.stddev.cwiseSqrt();
  for (int i = 0; i < dim; ++i) {
    if (!(probe.stddev[i] > 1e-12)) probe.stddev[i] = 1.0;
  }
  std::vector<Vector> xs;
  xs.reserve(features.size());
  for (const auto& x : features) {
    xs.push_back((x - probe.mean).cwiseQuotient(probe.stddev));
  }

  RngStream init(config.seed, kStreamProbeInit);
  probe.head = InitDenseHead(dim, config.hidden, num_classes, init);
  AdamOptimizer adam(config.learning_rate);

  std::vector<int> order(xs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::vector<int> holdout;
  const size_t n_holdout =
      static_cast<size_t>(config.validation_fraction * xs.size());
  if (n_holdout >= 1 && n_holdout < xs.size()) {
    RngStream rng(config.seed, kStreamProbeHoldout);
    Shuffle(order, rng);
    holdout.assign(order.end() - n_holdout, order.end());
    order.resize(order.size() - n_holdout);
    std::sort(order.begin(), order.end());
  }
  const double n_fit = static_cast<double>(order.size());

  auto holdout_loss = [&](const DenseHead& head) {
    double loss = 0.0;
    for (int i : holdout) loss += CrossEntropy(Classify(xs[i], head), labels[i]);
    return loss / static_cast<double>(holdout.size());
  };
  DenseHead best = probe.head;
  double best_loss = std::numeric_limits<double>::infinity();
  int stale_epochs = 0;

  HeadCache cache;
  double prev_loss = 0.0;
  int flat_epochs = 0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    RngStream rng(config.seed, RngStream::SubStream(kStreamProbeShuffle, epoch));
    Shuffle(order, rng);
    double epoch_loss = 0.0;
    for (size_t pos = 0; pos < order.size(); pos += config.batch_size) {
      const size_t end = std::min(order.size(), pos + config.batch_size);
      DenseHead grad = ZerosLike(probe.head);
      const double w = 1.0 / static_cast<double>(end - pos);
      for (size_t k = pos; k < end; ++k) {
        const int i = order[k];
        const Vector probs = Classify(xs[i], probe.head, &cache);
        epoch_loss += CrossEntropy(probs, labels[i]) / n_fit;
        HeadBackward(cache, w * SoftmaxCrossEntropyGrad(probs, labels[i]),
                     probe.head, grad, nullptr);
      }
      adam.Step(probe.head, grad);
    }
    probe.epochs_run = epoch + 1;
    if (!std::isfinite(epoch_loss)) {
      throw Error(ErrorCode::kDivergence, "probe loss is not finite");
    }
    if (!holdout.empty()) {
      const double loss = holdout_loss(probe.head);
      if (loss < best_loss) {
        best_loss = loss;
        best = probe.head;
        stale_epochs = 0;
      } else if (++stale_epochs >= config.patience) {
        break;
      }
    }
    if (epoch > 0) {
      const double rel =
          std::abs(epoch_loss - prev_loss) / std::max(prev_loss, 1e-12);
      flat_epochs = rel < config.tolerance ? flat_epochs + 1 : 0;
      if (flat_epochs >= 3) break;
    }
    prev_loss = epoch_loss;
  }
  if (!holdout.empty()) probe.head = std::move(best);
  return probe;
}

ReleaseSplit SplitRelease(const ReleasedSet& release, const Corpus& corpus) {
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < corpus.size(); ++i) index.emplace(corpus.documents[i].id, i);
  std::vector<bool> seen(corpus.size(), false);
  ReleaseSplit out;
  for (int r = 0; r < release.size(); ++r) {
    const auto it = index.find(release.ids[r]);
    if (it == index.end()) {
      throw Error(ErrorCode::kSchema,
                  "released id '" + release.ids[r] + "' not in corpus");
    }
    if (seen[it->second]) {
      throw Error(ErrorCode::kSchema,
                  "released id '" + release.ids[r] + "' appears twice");
    }
    seen[it->second] = true;
    if (release.rows[r].size() != release.header.dim) {
      throw Error(ErrorCode::kSchema, "release row has the wrong width");
    }
    if (corpus.documents[it->second].split == Split::kTrain) {
      out.train_x.push_back(release.rows[r]);
      out.train_docs.push_back(it->second);
    } else {
      out.test_x.push_back(release.rows[r]);
      out.test_docs.push_back(it->second);
    }
  }
  if (out.train_x.empty() || out.test_x.empty()) {
    throw Error(ErrorCode::kSchema, "release lacks a train or test split");
  }
  return out;
}

AttackResult RunAttack(const ReleasedSet& release, const Corpus& corpus,
                       std::string_view attribute, const ProbeConfig& config) {
  const int attr = corpus.schema.AttributeIndex(attribute);
  const int card = corpus.schema.attributes[attr].cardinality;
  const ReleaseSplit split = SplitRelease(release, corpus);
  const std::vector<int> train_y = AttributeLabels(corpus, split.train_docs, attr);
  const std::vector<int> test_y = AttributeLabels(corpus, split.test_docs, attr);

  AttackResult result;
  result.attribute = std::string(attribute);
  result.attacker = FitProbe(split.train_x, train_y, card, config);
  const std::vector<int> pred = Predict(result.attacker, split.test_x);
  result.macro_f1 = MacroF1(pred, test_y, card);
  result.confusion.assign(card, std::vector<int64_t>(card, 0));
  for (size_t i = 0; i < pred.size(); ++i) ++result.confusion[test_y[i]][pred[i]];
  result.train_size = static_cast<int>(split.train_x.size());
  result.test_size = static_cast<int>(split.test_x.size());
  return result;
}

double EvaluateUtility(const ReleasedSet& release, const Corpus& corpus,
                       const ProbeConfig& config) {
  const ReleaseSplit split = SplitRelease(release, corpus);
  const Probe probe = FitProbe(split.train_x, TaskLabels(corpus, split.train_docs),
                               corpus.schema.num_classes, config);
  return Accuracy(Predict(probe, split.test_x),
                  TaskLabels(corpus, split.test_docs));
}

double TaggingAccuracy(const Corpus& corpus, const TaggerParams& tagger,
                       Split split) {
  std::vector<int> pred, gold;
  for (const auto& doc : corpus.documents) {
    if (doc.split != split) continue;
    if (doc.tags.empty()) {
      throw Error(ErrorCode::kMissingTags, "document '" + doc.id + "'");
    }
    const std::vector<Vector> probs = TagSequence(doc, tagger);
    for (size_t i = 0; i < probs.size(); ++i) {
      pred.push_back(ArgMax(probs[i]));
      gold.push_back(doc.tags[i]);
    }
  }
  return Accuracy(pred, gold);
}

std::vector<std::string> AttributeNames(const CorpusSchema& schema) {
  std::vector<std::string> out;
  for (const auto& a : schema.attributes) out.push_back(a.name);
  return out;
}

std::string FormatReportCsv(const EvalReport& report) {
  using internal::FormatDouble;
  std::vector<EvalRow> rows = report.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const EvalRow& a, const EvalRow& b) {
    const double aa = a.alpha.value_or(-1.0);
    const double ba = b.alpha.value_or(-1.0);
    return std::make_tuple(MethodRank(a.method), a.method, aa, a.seed) <
           std::make_tuple(MethodRank(b.method), b.method, ba, b.seed);
  });
  std::ostringstream out;
  out << "method,alpha,seed,epsilon_used,utility";
  for (const auto& name : report.attributes) out << ",f1_" << name;
  out << ",n_train,n_test,audit,audit_max_log_ratio,audit_slack,release\n";
  for (const auto& row : rows) {
    if (row.attacker_f1.size() != report.attributes.size()) {
      throw Error(ErrorCode::kSchema, "report row has the wrong F1 count");
    }
    out << row.method << ","
        << (row.alpha ? FormatDouble(*row.alpha) : std::string("na")) << ","
        << row.seed << ","
        << (std::isinf(row.epsilon_used) ? std::string("inf")
                                         : FormatDouble(row.epsilon_used))
        << "," << FormatDouble(row.utility);
    for (double f1 : row.attacker_f1) out << "," << FormatDouble(f1);
    out << "," << row.train_size << "," << row.test_size << ",";
    if (row.audit) {
      out << (row.audit->pass ? "pass" : "fail") << ","
          << FormatDouble(row.audit->max_abs_log_ratio) << ","
          << FormatDouble(row.audit->slack_at_max);
    } else {
      out << "na,na,na";
    }
    out << "," << row.release << "\n";
  }
  return out.str();
}

AuditReport AuditRelease(double epsilon, int dim, const AuditConfig& config) {
  const double delta = Sensitivity(dim);
  return AuditDp(epsilon, delta, dim, Vector::Ones(dim), -Vector::Ones(dim),
                 config);
}

EvalRow ScoreRelease(const ReleasedSet& release, const Corpus& corpus,
                     const BaselineConfig& config, uint64_t seed) {
  EvalRow row;
  row.method = release.header.method;
  row.seed = seed;
  row.epsilon_used = release.header.epsilon_used;
  ProbeConfig probe = config.probe;
  probe.seed = seed;
  row.utility = EvaluateUtility(release, corpus, probe);
  for (const auto& a : corpus.schema.attributes) {
    const AttackResult attack = RunAttack(release, corpus, a.name, probe);
    row.attacker_f1.push_back(attack.macro_f1);
    row.train_size = attack.train_size;
    row.test_size = attack.test_size;
  }
  if (config.audit && std::isfinite(release.header.epsilon_used)) {
    row.audit = AuditRelease(release.header.epsilon_used, release.header.dim,
                             config.audit_config);
  }
  return row;
}

std::vector<EvalRow> RunBaselines(const Corpus& corpus,
                                  const EncoderParams& encoder,
                                  const BaselineConfig& config, uint64_t seed) {
  if (config.train.task != Task::kClassify) {
    throw Error(ErrorCode::kInvalidArgument,
                "baselines are defined for the classification task");
  }
  TrainConfig train = config.train;
  train.seed = seed;
  train.Validate();
  const std::vector<LatentRepresentation> latents = EncodeAll(corpus, encoder);

  std::vector<EvalRow> rows;
  rows.push_back(ScoreRelease(
      ReleaseCorpus(corpus, latents, ReleaseMethod::kOriginal, 0.0,
                    train.eps_floor, seed),
      corpus, config, seed));
  rows.push_back(ScoreRelease(
      ReleaseCorpus(corpus, latents, ReleaseMethod::kDifPriv, train.c1,
                    train.eps_floor, seed),
      corpus, config, seed));

  auto run_dptext = [&](const std::vector<std::string>& attributes,
                        const std::string& name) {
    TrainConfig tc = train;
    tc.attributes = attributes;
    const TrainResult trained = TrainDpText(corpus, encoder, tc);
    ReleasedSet release = ReleaseCorpus(corpus, latents, ReleaseMethod::kDpText,
                                        trained.eps_tilde, tc.eps_floor, seed);
    release.header.method = name;
    EvalRow row = ScoreRelease(release, corpus, config, seed);
    row.alpha = tc.alpha;
    rows.push_back(std::move(row));
  };
  run_dptext(train.attributes, "DPText");
  for (const auto& variant : config.variants) run_dptext(variant, JoinVariant(variant));
  return rows;
}

std::vector<SweepRow> AlphaSweep(const Corpus& corpus,
                                 const EncoderParams& encoder,
                                 const BaselineConfig& config,
                                 std::span<const double> alphas,
                                 std::span<const uint64_t> seeds) {
  if (alphas.empty() || seeds.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep needs alphas and seeds");
  }
  const std::vector<LatentRepresentation> latents = EncodeAll(corpus, encoder);
  std::vector<SweepRow> rows;
  for (uint64_t seed : seeds) {
    ProbeConfig probe = config.probe;
    probe.seed = seed;
    for (double alpha : alphas) {
      TrainConfig tc = config.train;
      tc.alpha = alpha;
      tc.seed = seed;
      const TrainResult trained = TrainDpText(corpus, encoder, tc);
      const ReleasedSet release =
          ReleaseCorpus(corpus, latents, ReleaseMethod::kDpText,
                        trained.eps_tilde, tc.eps_floor, seed);
      SweepRow row;
      row.alpha = alpha;
      row.seed = seed;
      row.eps_tilde = trained.eps_tilde;
      row.utility = EvaluateUtility(release, corpus, probe);
      for (const auto& a : corpus.schema.attributes) {
        row.attacker_f1.push_back(RunAttack(release, corpus, a.name, probe).macro_f1);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string FormatSweepCsv(std::span<const std::string> attributes,
                           std::vector<SweepRow> rows) {
  using internal::FormatDouble;
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.alpha, a.seed) < std::tie(b.alpha, b.seed);
  });
  std::ostringstream out;
  out << "alpha,seed,utility";
  for (const auto& name : attributes) out << ",f1_" << name;
  out << ",eps_tilde\n";
  for (const auto& row : rows) {
    out << FormatDouble(row.alpha) << "," << row.seed << ","
        << FormatDouble(row.utility);
    for (double f1 : row.attacker_f1) out << "," << FormatDouble(f1);
    out << "," << FormatDouble(row.eps_tilde) << "\n";
  }
  return out.str();
}

}  // namespace dptext
