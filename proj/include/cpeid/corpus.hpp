// Copyright 2026 The CPE-Identifier Authors
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
#ifndef CPEID_CORPUS_HPP_
#define CPEID_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cpeid/labels.hpp"

namespace cpeid {

inline constexpr std::size_t kDefaultMaxLen = 128;
inline constexpr std::string_view kPadToken = "[PAD]";

struct Token {
  std::string text;
  std::size_t char_start = 0;
  std::size_t char_end = 0;  // exclusive
  bool padding = false;

  bool operator==(const Token&) const = default;
};

struct TaggedSentence {
  std::vector<Token> tokens;
  std::vector<BioLabel> labels;
  std::string source_id;

  std::size_t size() const { return tokens.size(); }
  // Number of tokens that are not padding.
  std::size_t content_size() const;
  bool operator==(const TaggedSentence&) const = default;
};

using Corpus = std::vector<TaggedSentence>;

// A sentence whose labels may use any entity vocabulary (e.g. "B-os").
struct RawSentence {
  std::vector<Token> tokens;
  std::vector<std::string> labels;
  std::string source_id;
};

struct EntitySpan {
  Entity entity = Entity::kEdition;
  std::size_t token_start = 0;
  std::size_t token_end = 0;  // exclusive
  std::string text;

  bool operator==(const EntitySpan&) const = default;
};

struct CorpusStats {
  std::size_t sentence_count = 0;
  std::size_t length_min = 0;
  std::size_t length_max = 0;
  double fraction_below_max_len = 0.0;
  std::map<Entity, std::size_t> tokens_per_entity;

  bool operator==(const CorpusStats&) const = default;
};

// Whitespace split, then leading and trailing punctuation peeled off one
// character per token. Inside a word, '.' between two alphanumerics is kept
// ("11.5.9.615", "index.php"), as are '-' and '_'; any other punctuation
// character becomes its own token.
std::vector<Token> tokenize(std::string_view text);

// Text of tokens [start, end) joined by single spaces.
std::string join_tokens(std::span<const Token> tokens, std::size_t start,
                        std::size_t end);

// Throws OverlapError naming the colliding pair, InvalidArgument when a span
// leaves the token range.
std::vector<BioLabel> spans_to_bio(std::span<const Token> tokens,
                                   std::span<const EntitySpan> spans);

// Throws BioError on an invalid sequence and AlignmentError on a length
// mismatch. Padding tokens never start a span.
std::vector<EntitySpan> bio_to_spans(std::span<const BioLabel> labels,
                                     std::span<const Token> tokens);

struct LabelPolicy {
  std::set<std::string> keep;
  std::map<std::string, std::string> renames;
};

// keep = the five CPE entities; application/hardware/os renamed to product.
LabelPolicy default_label_policy();

// Applies the policy to arbitrary labels and repairs the result to valid
// BIO. Unknown or dropped entities become O.
TaggedSentence remap_labels(const RawSentence& sentence,
                            const LabelPolicy& policy);

// Truncates to max_len or appends "[PAD]"/O tokens flagged as padding.
// Throws InvalidArgument when max_len is 0.
TaggedSentence pad_or_trim(const TaggedSentence& sentence,
                           std::size_t max_len = kDefaultMaxLen);

// Drops padding tokens.
TaggedSentence strip_padding(const TaggedSentence& sentence);

// Lengths count non-padding tokens.
CorpusStats compute_stats(std::span<const TaggedSentence> corpus,
                          std::size_t max_len = kDefaultMaxLen);

// "token<TAB>label" lines, a blank line after each sentence, and a
// "# source_id = <id>" comment before each sentence. Offsets are not
// stored; read_conll assigns offsets over the single-space-joined text.
std::string write_conll(std::span<const TaggedSentence> corpus);

enum class ConllMode { kStrict, kLenient };

// Strict mode throws ParseError (with line number) on labels that are not in
// the label set or break BIO; lenient mode repairs orphan I-x to B-x.
Corpus read_conll(std::string_view bytes, ConllMode mode = ConllMode::kStrict);

// Reads any label vocabulary; used before remap_labels.
std::vector<RawSentence> read_conll_raw(std::string_view bytes);

// Builds canonical offsets for tokens given only their texts.
std::vector<Token> tokens_from_texts(std::span<const std::string> texts);

struct Split {
  Corpus train;
  Corpus test;
};

// Deterministic seeded shuffle; |test| = round(test_fraction * N).
// Throws InvalidArgument when N < 2 or test_fraction is outside (0, 1).
Split split_train_test(std::span<const TaggedSentence> corpus,
                       double test_fraction, std::uint64_t seed);

// Size of the test side for a corpus of n sentences.
std::size_t test_split_size(std::size_t n, double test_fraction);

// Token count per entity (B and I both count).
std::map<Entity, std::size_t> count_entity_tokens(
    std::span<const TaggedSentence> corpus);

// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fingerprint(std::string_view bytes);

}  // namespace cpeid

#endif  // CPEID_CORPUS_HPP_
