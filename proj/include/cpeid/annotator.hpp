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

#ifndef CPEID_ANNOTATOR_HPP_
#define CPEID_ANNOTATOR_HPP_

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cpeid/corpus.hpp"
#include "cpeid/cpe.hpp"
#include "cpeid/labels.hpp"
#include "cpeid/nvd.hpp"

namespace cpeid {

class Tagger;

using Term = std::vector<std::string>;

// Lowercased token sequences derived from CPE fields. Immutable once built.
class Gazetteer {
 public:
  Gazetteer() = default;

  // Adds a term for entity (vendor, product, update or edition). The value
  // is a raw CPE field: wildcards are ignored, '_' becomes a space.
  void add_field(Entity entity, std::string_view cpe_value);

  const std::set<Term>& terms(Entity entity) const;
  bool empty() const;
  std::size_t term_count() const;

  // Longest term starting at tokens[pos]; ties go to product, vendor,
  // update, edition in that order. Returns {0, _} when nothing matches.
  std::pair<std::size_t, Entity> longest_match(std::span<const Token> tokens,
                                               std::size_t pos) const;

  bool operator==(const Gazetteer& other) const { return terms_ == other.terms_; }

 private:
  std::map<Entity, std::set<Term>> terms_;
  // first token -> (entity, term) candidates
  std::unordered_map<std::string, std::vector<std::pair<Entity, Term>>>
      by_first_token_;
};

Gazetteer build_gazetteer(std::span<const CpeName> cpe_names);

// Digits separated by dots, at least one dot ("11.6", "2.0.1").
bool is_dotted_numeric(std::string_view token);

// Gazetteer longest-match, then the version rule for remaining tokens:
// dotted-numeric tokens always; other tokens starting with a digit ("2016",
// "7.0.8-60") only after "before", "through", "prior to", "version(s)" or "v".
TaggedSentence annotate_sentence(std::span<const Token> tokens,
                                 const Gazetteer& gazetteer);

struct AnnotationReport {
  std::size_t sentences_in = 0;
  std::size_t sentences_out = 0;
  std::map<Entity, std::size_t> tokens_labeled_per_entity;
  // Gazetteer terms that matched nowhere in their summary, plus CPE URIs
  // that could not be parsed.
  std::size_t unmatched_cpe_fields = 0;
  std::size_t unparsable_cpe_uris = 0;
  std::vector<std::string> skipped_ids;

  bool operator==(const AnnotationReport&) const = default;
};

struct AnnotationResult {
  Corpus corpus;
  AnnotationReport report;
};

// One sentence per entry, annotated against a gazetteer built from that
// entry's own CPE URIs. Parallel over entries; output order is input order.
AnnotationResult annotate_corpus(std::span<const CveEntry> entries);

// Single-threaded reference for annotate_corpus.
AnnotationResult annotate_corpus_serial(std::span<const CveEntry> entries);

// Labels tokens with any tagger and repairs the result to valid BIO.
// Propagates TransportError from remote taggers.
TaggedSentence annotate_with_tagger(std::span<const Token> tokens,
                                    const Tagger& tagger);

struct TaggerAnnotationResult {
  Corpus corpus;
  // Entries whose tagger call failed; their sentences are all-O.
  std::vector<std::string> failed_ids;
};

TaggerAnnotationResult annotate_entries_with_tagger(
    std::span<const CveEntry> entries, const Tagger& tagger);

// Gazetteer over every CPE URI linked to any entry (used by the predict
// path, where there is no per-CVE scope).
Gazetteer gazetteer_from_uris(std::span<const std::string> uris,
                              std::size_t* unparsable = nullptr);

}  // namespace cpeid

#endif  // CPEID_ANNOTATOR_HPP_
