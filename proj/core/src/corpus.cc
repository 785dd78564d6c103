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

#include "dptext/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "dptext/error.h"
#include "dptext/numerics.h"
#include "key_value.h"

namespace dptext {

using nlohmann::json;

Vocabulary::Vocabulary() : id_to_token_{"<pad>", "<unk>"} {}

int Vocabulary::Add(const std::string& token) {
  if (auto it = token_to_id_.find(token); it != token_to_id_.end()) {
    return it->second;
  }
  const int id = size();
  id_to_token_.push_back(token);
  token_to_id_.emplace(token, id);
  return id;
}

int Vocabulary::Lookup(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kOovId : it->second;
}

bool Vocabulary::Contains(std::string_view token) const {
  return token_to_id_.count(std::string(token)) > 0;
}

const std::string& Vocabulary::Token(int id) const {
  if (id < 0 || id >= size()) {
    throw Error(ErrorCode::kIndex, "token id " + std::to_string(id) +
                                       " outside vocabulary of size " +
                                       std::to_string(size()));
  }
  return id_to_token_[id];
}

std::vector<std::string> Vocabulary::RegularTokens() const {
  return {id_to_token_.begin() + kFirstTokenId, id_to_token_.end()};
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) && c < 128) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::vector<int> Tokenize(std::string_view text, const Vocabulary& vocab) {
  const std::vector<std::string> words = SplitWords(text);
  if (words.empty()) {
    throw Error(ErrorCode::kEmptyDocument, "no tokens after preprocessing");
  }
  std::vector<int> ids;
  ids.reserve(words.size());
  for (const auto& w : words) ids.push_back(vocab.Lookup(w));
  return ids;
}

Vocabulary BuildVocab(std::span<const std::string> texts, int min_count) {
  if (min_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_count must be >= 1");
  }
  std::map<std::string, int> counts;
  for (const auto& text : texts) {
    for (auto& w : SplitWords(text)) ++counts[w];
  }
  std::vector<std::pair<std::string, int>> kept;
  for (auto& [word, n] : counts) {
    if (n >= min_count) kept.emplace_back(word, n);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  for (const auto& [word, n] : kept) vocab.Add(word);
  return vocab;
}

int CorpusSchema::AttributeIndex(std::string_view name) const {
  for (int t = 0; t < num_attributes(); ++t) {
    if (attributes[t].name == name) return t;
  }
  throw Error(ErrorCode::kSchema,
              "unknown attribute '" + std::string(name) + "'");
}

void Corpus::Validate() const {
  if (documents.empty()) {
    throw Error(ErrorCode::kSchema, "corpus has no documents");
  }
  if (schema.num_classes < 1) {
    throw Error(ErrorCode::kSchema, "num_classes must be >= 1");
  }
  std::set<std::string> names;
  for (const auto& a : schema.attributes) {
    if (a.cardinality < 1) {
      throw Error(ErrorCode::kSchema,
                  "attribute '" + a.name + "' has cardinality < 1");
    }
    if (!names.insert(a.name).second) {
      throw Error(ErrorCode::kSchema, "duplicate attribute '" + a.name + "'");
    }
  }
  std::set<std::string> ids;
  for (const auto& doc : documents) {
    if (!ids.insert(doc.id).second) {
      throw Error(ErrorCode::kSchema, "duplicate document id '" + doc.id + "'");
    }
    if (doc.tokens.empty()) {
      throw Error(ErrorCode::kEmptyDocument, "document '" + doc.id + "'");
    }
    for (int tok : doc.tokens) {
      if (tok < 0 || tok >= vocab.size()) {
        throw Error(ErrorCode::kIndex,
                    "document '" + doc.id + "' has token id out of range");
      }
    }
    if (doc.label < 0 || doc.label >= schema.num_classes) {
      throw Error(ErrorCode::kSchema,
                  "document '" + doc.id + "' label out of range");
    }
    if (static_cast<int>(doc.attributes.size()) != schema.num_attributes()) {
      throw Error(ErrorCode::kSchema,
                  "document '" + doc.id + "' attribute count mismatch");
    }
    for (int t = 0; t < schema.num_attributes(); ++t) {
      if (doc.attributes[t] < 0 ||
          doc.attributes[t] >= schema.attributes[t].cardinality) {
        throw Error(ErrorCode::kSchema, "document '" + doc.id +
                                            "' attribute '" +
                                            schema.attributes[t].name +
                                            "' out of range");
      }
    }
    if (!doc.tags.empty()) {
      if (doc.tags.size() != doc.tokens.size()) {
        throw Error(ErrorCode::kSchema,
                    "document '" + doc.id + "' tag count != token count");
      }
      for (int tag : doc.tags) {
        if (tag < 0 || tag >= schema.num_tags) {
          throw Error(ErrorCode::kSchema,
                      "document '" + doc.id + "' tag out of range");
        }
      }
    }
  }
}

std::vector<int> Corpus::IndicesFor(Split split) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (documents[i].split == split) out.push_back(i);
  }
  return out;
}

namespace {

// Stream ids used by the generator; each consumer owns one.
constexpr uint64_t kStreamLabels = 1;
constexpr uint64_t kStreamAttributes = 2;
constexpr uint64_t kStreamSplit = 3;
constexpr uint64_t kStreamDocuments = 4;

int SampleCategorical(std::span<const double> cdf, RngStream& rng) {
  const double u = rng.NextUniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<int>(it - cdf.begin()),
                  static_cast<int>(cdf.size()) - 1);
}

std::vector<double> Cumulative(std::span<const double> weights) {
  std::vector<double> cdf(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cdf.begin());
  return cdf;
}

// Class values for n documents: explicit prior -> i.i.d.; otherwise either a
// shuffled round-robin (balanced) or i.i.d. uniform.
std::vector<int> AssignClasses(int n, int cardinality,
                               std::span<const double> prior, bool balanced,
                               RngStream& rng) {
  std::vector<int> out(n);
  if (!prior.empty()) {
    const auto cdf = Cumulative(prior);
    for (int i = 0; i < n; ++i) out[i] = SampleCategorical(cdf, rng);
  } else if (balanced) {
    for (int i = 0; i < n; ++i) out[i] = i % cardinality;
    Shuffle(out, rng);
  } else {
    for (int i = 0; i < n; ++i) out[i] = rng.NextInt(cardinality);
  }
  return out;
}

void ValidateSyntheticSpec(const SyntheticSpec& spec) {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidSpec, msg);
  };
  if (spec.num_docs < 1) fail("num_docs must be >= 1");
  if (spec.num_classes < 1) fail("num_classes must be >= 1");
  if (spec.min_length < 1 || spec.max_length < spec.min_length) {
    fail("need 1 <= min_length <= max_length");
  }
  if (spec.max_doc_length < 1) fail("max_doc_length must be >= 1");
  if (spec.tokens_per_value < 1) fail("tokens_per_value must be >= 1");
  if (!(spec.utility_signal >= 0.0 && spec.utility_signal <= 1.0)) {
    fail("utility_signal must lie in [0,1]");
  }
  if (!(spec.test_fraction >= 0.0 && spec.test_fraction < 1.0)) {
    fail("test_fraction must lie in [0,1)");
  }
  int values = spec.num_classes;
  std::set<std::string> names;
  for (const auto& a : spec.attributes) {
    if (a.name.empty()) fail("attribute with empty name");
    if (!names.insert(a.name).second) fail("duplicate attribute " + a.name);
    if (a.cardinality < 1) fail("attribute " + a.name + " cardinality < 1");
    if (!(a.signal >= 0.0 && a.signal <= 1.0)) {
      fail("attribute " + a.name + " signal must lie in [0,1]");
    }
    if (!a.prior.empty()) {
      if (static_cast<int>(a.prior.size()) != a.cardinality) {
        fail("attribute " + a.name + " prior length != cardinality");
      }
      double s = 0.0;
      for (double p : a.prior) {
        if (!(p >= 0.0)) fail("attribute " + a.name + " prior negative");
        s += p;
      }
      if (!(s > 0.0)) fail("attribute " + a.name + " prior sums to 0");
    }
    values += a.cardinality;
  }
  if (spec.vocab_size <= kFirstTokenId + values) {
    fail("vocab_size must exceed reserved ids + classes + attribute values (" +
         std::to_string(kFirstTokenId + values) + ")");
  }
}

}  // namespace

void AssignSplits(Corpus& corpus, double test_fraction, uint64_t seed) {
  const int n = corpus.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  RngStream rng(seed, kStreamSplit);
  Shuffle(order, rng);
  const int n_test = static_cast<int>(std::lround(n * test_fraction));
  for (int i = 0; i < n; ++i) {
    corpus.documents[order[i]].split = i < n_test ? Split::kTest : Split::kTrain;
  }
}

Corpus GenerateSyntheticCorpus(const SyntheticSpec& spec) {
  ValidateSyntheticSpec(spec);
  const int num_attrs = static_cast<int>(spec.attributes.size());

  int total_values = spec.num_classes;
  for (const auto& a : spec.attributes) total_values += a.cardinality;
  // Shrink the per-value pool until at least one background token remains.
  int per_value = spec.tokens_per_value;
  while (per_value > 1 &&
         kFirstTokenId + total_values * per_value >= spec.vocab_size) {
    --per_value;
  }

  Corpus corpus;
  corpus.schema.num_classes = spec.num_classes;
  corpus.schema.num_tags = kNumSyntheticTags;
  corpus.schema.max_length = spec.max_doc_length;
  for (const auto& a : spec.attributes) {
    corpus.schema.attributes.push_back({a.name, a.cardinality});
  }

  // pools[channel][value] -> token ids; channel 0 is the task label.
  std::vector<std::vector<std::vector<int>>> pools(num_attrs + 1);
  pools[0].resize(spec.num_classes);
  for (int c = 0; c < spec.num_classes; ++c) {
    for (int j = 0; j < per_value; ++j) {
      pools[0][c].push_back(corpus.vocab.Add("c" + std::to_string(c) + "t" +
                                             std::to_string(j)));
    }
  }
  for (int t = 0; t < num_attrs; ++t) {
    pools[t + 1].resize(spec.attributes[t].cardinality);
    for (int v = 0; v < spec.attributes[t].cardinality; ++v) {
      for (int j = 0; j < per_value; ++j) {
        pools[t + 1][v].push_back(corpus.vocab.Add(
            "a" + std::to_string(t) + "v" + std::to_string(v) + "t" +
            std::to_string(j)));
      }
    }
  }
  std::vector<int> background;
  for (int n = 0; corpus.vocab.size() < spec.vocab_size; ++n) {
    background.push_back(corpus.vocab.Add("w" + std::to_string(n)));
  }
  std::vector<double> zipf(background.size());
  for (size_t k = 0; k < zipf.size(); ++k) zipf[k] = 1.0 / (k + 1.0);
  const std::vector<double> background_cdf = Cumulative(zipf);

  RngStream label_rng(spec.seed, kStreamLabels);
  const std::vector<int> labels =
      AssignClasses(spec.num_docs, spec.num_classes, {}, spec.balanced,
                    label_rng);
  std::vector<std::vector<int>> attr_values(num_attrs);
  for (int t = 0; t < num_attrs; ++t) {
    RngStream rng(spec.seed,
                  RngStream::SubStream(kStreamAttributes, static_cast<uint64_t>(t)));
    attr_values[t] =
        AssignClasses(spec.num_docs, spec.attributes[t].cardinality,
                      spec.attributes[t].prior, spec.balanced, rng);
  }

  std::vector<double> signal(num_attrs + 1);
  signal[0] = spec.utility_signal;
  for (int t = 0; t < num_attrs; ++t) signal[t + 1] = spec.attributes[t].signal;

  corpus.documents.reserve(spec.num_docs);
  for (int i = 0; i < spec.num_docs; ++i) {
    RngStream rng(spec.seed,
                  RngStream::SubStream(kStreamDocuments, static_cast<uint64_t>(i)));
    Document doc;
    char id[32];
    std::snprintf(id, sizeof(id), "doc%06d", i);
    doc.id = id;
    doc.label = labels[i];
    for (int t = 0; t < num_attrs; ++t) doc.attributes.push_back(attr_values[t][i]);

    const int length = std::min(
        spec.min_length + rng.NextInt(spec.max_length - spec.min_length + 1),
        spec.max_doc_length);
    for (int pos = 0; pos < length; ++pos) {
      const int channel = rng.NextInt(num_attrs + 1);
      const double u = rng.NextUniform();
      if (u < signal[channel]) {
        const int value = channel == 0 ? doc.label : doc.attributes[channel - 1];
        const auto& pool = pools[channel][value];
        doc.tokens.push_back(pool[rng.NextInt(static_cast<int>(pool.size()))]);
        doc.tags.push_back(channel == 0 ? kTagLabel : kTagAttribute);
      } else {
        doc.tokens.push_back(background[SampleCategorical(background_cdf, rng)]);
        doc.tags.push_back(kTagBackground);
      }
    }
    corpus.documents.push_back(std::move(doc));
  }
  AssignSplits(corpus, spec.test_fraction, spec.seed);
  corpus.Validate();
  return corpus;
}

SyntheticSpec ParseSyntheticSpec(std::string_view text) {
  using namespace internal;
  constexpr ErrorCode kCode = ErrorCode::kInvalidSpec;
  const auto kv = ParseKeyValues(text, kCode);
  SyntheticSpec spec;
  std::map<std::string, std::vector<double>> priors;
  for (const auto& [key, value] : kv) {
    if (key == "num_docs") {
      spec.num_docs = static_cast<int>(ParseInt(key, value, kCode));
    } else if (key == "vocab_size") {
      spec.vocab_size = static_cast<int>(ParseInt(key, value, kCode));
    } else if (key == "num_classes") {
      spec.num_classes = static_cast<int>(ParseInt(key, value, kCode));
    } else if (key == "utility_signal") {
      spec.utility_signal = ParseDouble(key, value, kCode);
    } else if (key == "attributes") {
      spec.attributes.clear();
      if (value.empty()) continue;
      for (const auto& item : SplitOn(value, ',')) {
        const auto parts = SplitOn(item, ':');
        if (parts.size() != 3) {
          throw Error(kCode, "attributes entry '" + item +
                                 "' must be name:cardinality:signal");
        }
        spec.attributes.push_back(
            {parts[0], static_cast<int>(ParseInt(key, parts[1], kCode)),
             ParseDouble(key, parts[2], kCode), {}});
      }
    } else if (key.rfind("prior.", 0) == 0) {
      std::vector<double> p;
      for (const auto& item : SplitOn(value, ',')) {
        p.push_back(ParseDouble(key, item, kCode));
      }
      priors[key.substr(6)] = std::move(p);
    } else if (key == "min_length") {
      spec.min_length = static_cast<int>(ParseInt(key, value, kCode));
    } else if (key == "max_length") {
      spec.max_length = static_cast<int>(ParseInt(key, value, kCode));
    } else if (key == "max_doc_length") {
      spec.max_doc_length = static_cast<int>(ParseInt(key, value, kCode));
    } else if (key == "tokens_per_value") {
      spec.tokens_per_value = static_cast<int>(ParseInt(key, value, kCode));
    } else if (key == "balanced") {
      spec.balanced = ParseBool(key, value, kCode);
    } else if (key == "test_fraction") {
      spec.test_fraction = ParseDouble(key, value, kCode);
    } else if (key == "seed") {
      spec.seed = ParseUint(key, value, kCode);
    } else {
      throw Error(kCode, "unknown key '" + key + "'");
    }
  }
  for (auto& [name, p] : priors) {
    auto it = std::find_if(spec.attributes.begin(), spec.attributes.end(),
                           [&](const auto& a) { return a.name == name; });
    if (it == spec.attributes.end()) {
      throw Error(kCode, "prior for unknown attribute '" + name + "'");
    }
    it->prior = std::move(p);
  }
  ValidateSyntheticSpec(spec);
  return spec;
}

std::string FormatSyntheticSpec(const SyntheticSpec& spec) {
  using internal::FormatDouble;
  std::ostringstream out;
  out << "num_docs=" << spec.num_docs << "\n"
      << "vocab_size=" << spec.vocab_size << "\n"
      << "num_classes=" << spec.num_classes << "\n"
      << "utility_signal=" << FormatDouble(spec.utility_signal) << "\n"
      << "attributes=";
  for (size_t t = 0; t < spec.attributes.size(); ++t) {
    const auto& a = spec.attributes[t];
    out << (t ? "," : "") << a.name << ":" << a.cardinality << ":"
        << FormatDouble(a.signal);
  }
  out << "\n";
  for (const auto& a : spec.attributes) {
    if (a.prior.empty()) continue;
    out << "prior." << a.name << "=";
    for (size_t k = 0; k < a.prior.size(); ++k) {
      out << (k ? "," : "") << FormatDouble(a.prior[k]);
    }
    out << "\n";
  }
  out << "min_length=" << spec.min_length << "\n"
      << "max_length=" << spec.max_length << "\n"
      << "max_doc_length=" << spec.max_doc_length << "\n"
      << "tokens_per_value=" << spec.tokens_per_value << "\n"
      << "balanced=" << (spec.balanced ? "true" : "false") << "\n"
      << "test_fraction=" << FormatDouble(spec.test_fraction) << "\n"
      << "seed=" << spec.seed << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// JSONL

namespace {

std::string RenderText(const Document& doc, const Vocabulary& vocab) {
  std::string text;
  for (size_t i = 0; i < doc.tokens.size(); ++i) {
    if (i) text.push_back(' ');
    text += vocab.Token(doc.tokens[i]);
  }
  return text;
}

[[noreturn]] void SchemaFail(int line, const std::string& msg) {
  throw Error(ErrorCode::kSchema, "line " + std::to_string(line) + ": " + msg);
}

const json& Require(const json& obj, const char* field, int line) {
  auto it = obj.find(field);
  if (it == obj.end()) SchemaFail(line, std::string("missing field \"") + field + "\"");
  return *it;
}

int RequireInt(const json& obj, const char* field, int line) {
  const json& v = Require(obj, field, line);
  if (!v.is_number_integer()) {
    SchemaFail(line, std::string("field \"") + field + "\" must be an integer");
  }
  return v.get<int>();
}

}  // namespace

std::string SerializeCorpus(const Corpus& corpus) {
  json schema;
  schema["num_classes"] = corpus.schema.num_classes;
  json attrs = json::array();
  for (const auto& a : corpus.schema.attributes) {
    attrs.push_back({{"name", a.name}, {"cardinality", a.cardinality}});
  }
  schema["attributes"] = std::move(attrs);
  schema["num_tags"] = corpus.schema.num_tags;
  schema["max_length"] = corpus.schema.max_length;
  schema["vocabulary"] = corpus.vocab.RegularTokens();

  std::string out = json{{"schema", schema}}.dump();
  out.push_back('\n');
  for (const auto& doc : corpus.documents) {
    json line;
    line["id"] = doc.id;
    line["text"] = RenderText(doc, corpus.vocab);
    line["label"] = doc.label;
    json attributes = json::object();
    for (int t = 0; t < corpus.schema.num_attributes(); ++t) {
      attributes[corpus.schema.attributes[t].name] = doc.attributes[t];
    }
    line["attributes"] = std::move(attributes);
    if (!doc.tags.empty()) line["tags"] = doc.tags;
    line["split"] = doc.split == Split::kTest ? "test" : "train";
    out += line.dump();
    out.push_back('\n');
  }
  return out;
}

Corpus ParseCorpus(std::string_view jsonl) {
  Corpus corpus;
  std::vector<json> rows;
  std::vector<int> row_lines;
  bool have_schema = false;
  bool have_vocab = false;
  bool any_split = false;
  double test_fraction = 0.2;
  uint64_t split_seed = 1;

  int line_no = 0;
  size_t start = 0;
  while (start < jsonl.size()) {
    size_t end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    ++line_no;
    const std::string_view line = internal::Trim(jsonl.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": expected an object");
    }
    if (obj.contains("schema")) {
      if (have_schema || !rows.empty()) {
        SchemaFail(line_no, "schema header must be the first line");
      }
      const json& s = obj["schema"];
      corpus.schema.num_classes = RequireInt(s, "num_classes", line_no);
      for (const auto& a : Require(s, "attributes", line_no)) {
        corpus.schema.attributes.push_back(
            {Require(a, "name", line_no).get<std::string>(),
             RequireInt(a, "cardinality", line_no)});
      }
      corpus.schema.num_tags = s.value("num_tags", 0);
      corpus.schema.max_length = s.value("max_length", 32);
      if (s.contains("vocabulary")) {
        for (const auto& tok : s["vocabulary"]) {
          corpus.vocab.Add(tok.get<std::string>());
        }
        have_vocab = true;
      }
      test_fraction = s.value("test_fraction", 0.2);
      split_seed = s.value("split_seed", uint64_t{1});
      have_schema = true;
      continue;
    }
    if (!have_schema) SchemaFail(line_no, "missing schema header line");
    rows.push_back(std::move(obj));
    row_lines.push_back(line_no);
  }
  if (!have_schema) throw Error(ErrorCode::kSchema, "missing schema header");

  if (!have_vocab) {
    std::vector<std::string> texts;
    for (size_t i = 0; i < rows.size(); ++i) {
      texts.push_back(Require(rows[i], "text", row_lines[i]).get<std::string>());
    }
    corpus.vocab = BuildVocab(texts, 1);
  }

  for (size_t i = 0; i < rows.size(); ++i) {
    const json& row = rows[i];
    const int ln = row_lines[i];
    Document doc;
    doc.id = Require(row, "id", ln).get<std::string>();
    const std::string text = Require(row, "text", ln).get<std::string>();
    doc.label = RequireInt(row, "label", ln);
    try {
      doc.tokens = Tokenize(text, corpus.vocab);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(ln) + ": " + e.what());
    }
    if (static_cast<int>(doc.tokens.size()) > corpus.schema.max_length) {
      doc.tokens.resize(corpus.schema.max_length);
    }
    const json& attrs = Require(row, "attributes", ln);
    if (!attrs.is_object()) SchemaFail(ln, "\"attributes\" must be an object");
    for (auto it = attrs.begin(); it != attrs.end(); ++it) {
      bool known = false;
      for (const auto& a : corpus.schema.attributes) known |= a.name == it.key();
      if (!known) SchemaFail(ln, "attribute \"" + it.key() + "\" not in schema");
    }
    for (const auto& a : corpus.schema.attributes) {
      doc.attributes.push_back(RequireInt(attrs, a.name.c_str(), ln));
    }
    if (row.contains("tags")) {
      doc.tags = row["tags"].get<std::vector<int>>();
      if (doc.tags.size() > doc.tokens.size()) doc.tags.resize(doc.tokens.size());
    }
    if (row.contains("split")) {
      const std::string split = row["split"].get<std::string>();
      if (split != "train" && split != "test") {
        SchemaFail(ln, "\"split\" must be \"train\" or \"test\"");
      }
      doc.split = split == "test" ? Split::kTest : Split::kTrain;
      any_split = true;
    }
    corpus.documents.push_back(std::move(doc));
  }
  if (!any_split && !corpus.documents.empty()) {
    AssignSplits(corpus, test_fraction, split_seed);
  }
  corpus.Validate();
  return corpus;
}

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << SerializeCorpus(corpus);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

Corpus LoadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseCorpus(buf.str());
}

}  // namespace dptext
