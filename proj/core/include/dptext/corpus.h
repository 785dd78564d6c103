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

#ifndef DPTEXT_CORPUS_H_
#define DPTEXT_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dptext {

inline constexpr int kPaddingId = 0;
inline constexpr int kOovId = 1;
inline constexpr int kFirstTokenId = 2;

// Token <-> id map. Ids 0 and 1 are reserved for padding and out-of-vocabulary
// tokens; every other id maps to exactly one token.
class Vocabulary {
 public:
  Vocabulary();

  // Returns the id of `token`, inserting it if absent.
  int Add(const std::string& token);
  // Id of `token`, or kOovId if unknown.
  int Lookup(std::string_view token) const;
  bool Contains(std::string_view token) const;
  const std::string& Token(int id) const;
  int size() const { return static_cast<int>(id_to_token_.size()); }

  // Non-reserved tokens in id order (ids kFirstTokenId, kFirstTokenId+1, ...).
  std::vector<std::string> RegularTokens() const;

  bool operator==(const Vocabulary& other) const {
    return id_to_token_ == other.id_to_token_;
  }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

// Lowercases and splits on anything that is not an ASCII letter or digit.
std::vector<std::string> SplitWords(std::string_view text);

// Maps words to ids; unknown words map to kOovId. Throws kEmptyDocument if no
// word survives preprocessing.
std::vector<int> Tokenize(std::string_view text, const Vocabulary& vocab);

// Tokens with frequency >= min_count get ids from kFirstTokenId in descending
// frequency order, ties broken lexicographically.
Vocabulary BuildVocab(std::span<const std::string> texts, int min_count);

struct AttributeSpec {
  std::string name;
  int cardinality = 2;

  bool operator==(const AttributeSpec&) const = default;
};

struct CorpusSchema {
  int num_classes = 2;
  std::vector<AttributeSpec> attributes;
  // Size of the per-token tag set; 0 when documents carry no tags.
  int num_tags = 0;
  int max_length = 32;

  int num_attributes() const { return static_cast<int>(attributes.size()); }
  // Index of the attribute named `name`; throws kSchema if absent.
  int AttributeIndex(std::string_view name) const;

  bool operator==(const CorpusSchema&) const = default;
};

enum class Split { kTrain, kTest };

struct Document {
  std::string id;
  std::vector<int> tokens;
  int label = 0;
  // One value per schema attribute, in schema order.
  std::vector<int> attributes;
  // Empty, or one tag per token.
  std::vector<int> tags;
  Split split = Split::kTrain;

  bool operator==(const Document&) const = default;
};

struct Corpus {
  CorpusSchema schema;
  Vocabulary vocab;
  std::vector<Document> documents;

  // Throws kSchema / kEmptyDocument / kIndex if any invariant is violated.
  void Validate() const;
  std::vector<int> IndicesFor(Split split) const;
  int size() const { return static_cast<int>(documents.size()); }

  bool operator==(const Corpus&) const = default;
};

// Deterministic split: a seeded shuffle marks round(N * test_fraction)
// documents as test.
void AssignSplits(Corpus& corpus, double test_fraction, uint64_t seed);

struct SyntheticAttribute {
  std::string name;
  int cardinality = 2;
  // Probability that a token slot on this attribute's channel carries an
  // attribute-indicative token.
  double signal = 0.0;
  // Optional class prior; empty means uniform (or exactly balanced).
  std::vector<double> prior;
};

// Parameters of the planted-signal generator. Each token position picks one
// of T+1 channels uniformly (the task label or one of the T attributes); with
// probability equal to that channel's signal strength it emits a token
// indicative of the document's value on that channel, otherwise a background
// token drawn from a Zipf distribution.
struct SyntheticSpec {
  int num_docs = 2000;
  int vocab_size = 120;
  int num_classes = 2;
  double utility_signal = 0.9;
  std::vector<SyntheticAttribute> attributes = {
      {"gender", 2, 0.9, {}},
      {"age", 3, 0.3, {}},
  };
  int min_length = 8;
  int max_length = 24;
  int max_doc_length = 32;
  int tokens_per_value = 3;
  // Exact round-robin class assignment (shuffled) instead of i.i.d. draws
  // for the label and for attributes without an explicit prior.
  bool balanced = true;
  double test_fraction = 0.2;
  uint64_t seed = 1;
};

// Synthetic tag values: background, label-indicative, attribute-indicative.
inline constexpr int kTagBackground = 0;
inline constexpr int kTagLabel = 1;
inline constexpr int kTagAttribute = 2;
inline constexpr int kNumSyntheticTags = 3;

// Flat key=value text, e.g.
//   num_docs=2000
//   attributes=gender:2:0.9,age:3:0.3
//   prior.age=0.5,0.3,0.2
// Unknown keys are rejected with kInvalidSpec.
SyntheticSpec ParseSyntheticSpec(std::string_view text);
std::string FormatSyntheticSpec(const SyntheticSpec& spec);

Corpus GenerateSyntheticCorpus(const SyntheticSpec& spec);

// JSONL corpus file. The first line holds {"schema": {...}} with the class
// count, attribute names and cardinalities, tag-set size, and vocabulary;
// each further line is one document.
void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus LoadCorpus(const std::filesystem::path& path);

// String forms of the above, used by the file functions and by tests.
std::string SerializeCorpus(const Corpus& corpus);
Corpus ParseCorpus(std::string_view jsonl);

}  // namespace dptext

#endif  // DPTEXT_CORPUS_H_
