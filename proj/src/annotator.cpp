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

#include "cpeid/annotator.hpp"

#include <algorithm>
#include <cctype>

#include "cpeid/error.hpp"
#include "cpeid/tagger.hpp"

namespace cpeid {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool starts_with_digit(std::string_view token) {
  return !token.empty() && std::isdigit(static_cast<unsigned char>(token.front()));
}

bool version_context_before(std::span<const Token> tokens, std::size_t pos) {
  if (pos == 0) return false;
  const std::string prev = lower(tokens[pos - 1].text);
  if (prev == "before" || prev == "through" || prev == "version" ||
      prev == "versions" || prev == "v") {
    return true;
  }
  return prev == "to" && pos >= 2 && lower(tokens[pos - 2].text) == "prior";
}

constexpr Entity kPriority[] = {Entity::kProduct, Entity::kVendor,
                                Entity::kUpdate, Entity::kEdition};

int priority_rank(Entity e) {
  for (int i = 0; i < 4; ++i) {
    if (kPriority[i] == e) return i;
  }
  return 4;
}

struct EntryResult {
  TaggedSentence sentence;
  std::size_t unmatched = 0;
  std::size_t unparsable = 0;
  bool skipped = false;
};

EntryResult annotate_entry(const CveEntry& entry) {
  EntryResult result;
  std::vector<CpeName> names;
  for (const std::string& uri : entry.cpe_uris) {
    try {
      names.push_back(parse_cpe_uri(uri));
    } catch (const CpeError&) {
      ++result.unparsable;
    }
  }
  const Gazetteer gazetteer = build_gazetteer(names);
  const std::vector<Token> tokens = tokenize(entry.summary);
  if (tokens.empty()) {
    result.skipped = true;
    return result;
  }
  result.sentence = annotate_sentence(tokens, gazetteer);
  result.sentence.source_id = entry.cve_id;

  // A term counts as matched if some labeled span has exactly its words.
  std::set<std::pair<Entity, Term>> seen;
  for (const EntitySpan& span : bio_to_spans(result.sentence.labels, tokens)) {
    Term words;
    for (std::size_t i = span.token_start; i < span.token_end; ++i) {
      words.push_back(lower(tokens[i].text));
    }
    seen.emplace(span.entity, std::move(words));
  }
  for (const Entity e : {Entity::kVendor, Entity::kProduct, Entity::kUpdate,
                         Entity::kEdition}) {
    for (const Term& term : gazetteer.terms(e)) {
      if (!seen.contains({e, term})) ++result.unmatched;
    }
  }
  result.unmatched += result.unparsable;
  return result;
}

AnnotationResult reduce(std::span<const CveEntry> entries,
                        std::vector<EntryResult>& results) {
  AnnotationResult out;
  out.report.sentences_in = entries.size();
  for (const Entity e : kAllEntities) out.report.tokens_labeled_per_entity[e] = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    EntryResult& r = results[i];
    out.report.unmatched_cpe_fields += r.unmatched;
    out.report.unparsable_cpe_uris += r.unparsable;
    if (r.skipped) {
      out.report.skipped_ids.push_back(entries[i].cve_id);
      continue;
    }
    for (const BioLabel& l : r.sentence.labels) {
      if (!l.is_outside()) ++out.report.tokens_labeled_per_entity[l.entity];
    }
    out.corpus.push_back(std::move(r.sentence));
  }
  out.report.sentences_out = out.corpus.size();
  return out;
}

}  // namespace

void Gazetteer::add_field(Entity entity, std::string_view cpe_value) {
  if (is_wildcard(cpe_value)) return;
  std::string text(cpe_value);
  std::replace(text.begin(), text.end(), '_', ' ');
  Term term;
  for (const Token& t : tokenize(text)) term.push_back(lower(t.text));
  if (term.empty()) return;
  auto [it, inserted] = terms_[entity].insert(std::move(term));
  if (inserted) by_first_token_[it->front()].emplace_back(entity, *it);
}

const std::set<Term>& Gazetteer::terms(Entity entity) const {
  static const std::set<Term> kEmpty;
  auto it = terms_.find(entity);
  return it == terms_.end() ? kEmpty : it->second;
}

bool Gazetteer::empty() const { return term_count() == 0; }

std::size_t Gazetteer::term_count() const {
  std::size_t n = 0;
  for (const auto& [e, set] : terms_) n += set.size();
  return n;
}

std::pair<std::size_t, Entity> Gazetteer::longest_match(
    std::span<const Token> tokens, std::size_t pos) const {
  std::pair<std::size_t, Entity> best{0, Entity::kProduct};
  if (pos >= tokens.size() || tokens[pos].padding) return best;
  auto it = by_first_token_.find(lower(tokens[pos].text));
  if (it == by_first_token_.end()) return best;
  for (const auto& [entity, term] : it->second) {
    const std::size_t len = term.size();
    if (len < best.first || pos + len > tokens.size()) continue;
    if (len == best.first && priority_rank(entity) >= priority_rank(best.second)) {
      continue;
    }
    bool match = true;
    for (std::size_t k = 1; k < len && match; ++k) {
      match = !tokens[pos + k].padding && lower(tokens[pos + k].text) == term[k];
    }
    if (match) best = {len, entity};
  }
  return best;
}

Gazetteer build_gazetteer(std::span<const CpeName> cpe_names) {
  Gazetteer gazetteer;
  for (const CpeName& name : cpe_names) {
    gazetteer.add_field(Entity::kVendor, name.vendor);
    gazetteer.add_field(Entity::kProduct, name.product);
    gazetteer.add_field(Entity::kUpdate, name.update);
    gazetteer.add_field(Entity::kEdition, name.edition);
  }
  return gazetteer;
}

Gazetteer gazetteer_from_uris(std::span<const std::string> uris,
                              std::size_t* unparsable) {
  std::vector<CpeName> names;
  std::size_t bad = 0;
  for (const std::string& uri : uris) {
    try {
      names.push_back(parse_cpe_uri(uri));
    } catch (const CpeError&) {
      ++bad;
    }
  }
  if (unparsable != nullptr) *unparsable = bad;
  return build_gazetteer(names);
}

bool is_dotted_numeric(std::string_view token) {
  bool saw_dot = false;
  bool prev_digit = false;
  for (const char c : token) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      prev_digit = true;
    } else if (c == '.' && prev_digit) {
      saw_dot = true;
      prev_digit = false;
    } else {
      return false;
    }
  }
  return saw_dot && prev_digit;
}

TaggedSentence annotate_sentence(std::span<const Token> tokens,
                                 const Gazetteer& gazetteer) {
  TaggedSentence out;
  out.tokens.assign(tokens.begin(), tokens.end());
  out.labels.assign(tokens.size(), BioLabel::outside());
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (tokens[i].padding) {
      ++i;
      continue;
    }
    const auto [len, entity] = gazetteer.longest_match(tokens, i);
    if (len > 0) {
      out.labels[i] = BioLabel::begin(entity);
      for (std::size_t k = 1; k < len; ++k) out.labels[i + k] = BioLabel::inside(entity);
      i += len;
      continue;
    }
    const std::string_view text = tokens[i].text;
    if (is_dotted_numeric(text) ||
        (starts_with_digit(text) && version_context_before(tokens, i))) {
      out.labels[i] = BioLabel::begin(Entity::kVersion);
    }
    ++i;
  }
  return out;
}

AnnotationResult annotate_corpus(std::span<const CveEntry> entries) {
  std::vector<EntryResult> results(entries.size());
  const auto n = static_cast<std::ptrdiff_t>(entries.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    results[static_cast<std::size_t>(i)] =
        annotate_entry(entries[static_cast<std::size_t>(i)]);
  }
  return reduce(entries, results);
}

AnnotationResult annotate_corpus_serial(std::span<const CveEntry> entries) {
  std::vector<EntryResult> results;
  results.reserve(entries.size());
  for (const CveEntry& e : entries) results.push_back(annotate_entry(e));
  return reduce(entries, results);
}

TaggedSentence annotate_with_tagger(std::span<const Token> tokens,
                                    const Tagger& tagger) {
  TaggedSentence out;
  out.tokens.assign(tokens.begin(), tokens.end());
  const std::vector<BioLabel> labels = tagger.label(tokens);
  if (labels.size() != tokens.size()) {
    throw AlignmentError("tagger '" + std::string(tagger.kind()) + "' returned " +
                         std::to_string(labels.size()) + " labels for " +
                         std::to_string(tokens.size()) + " tokens");
  }
  out.labels = repair_bio(labels);
  return out;
}

TaggerAnnotationResult annotate_entries_with_tagger(
    std::span<const CveEntry> entries, const Tagger& tagger) {
  TaggerAnnotationResult out;
  for (const CveEntry& e : entries) {
    const std::vector<Token> tokens = tokenize(e.summary);
    TaggedSentence s;
    try {
      s = annotate_with_tagger(tokens, tagger);
    } catch (const TransportError&) {
      s.tokens = tokens;
      s.labels.assign(tokens.size(), BioLabel::outside());
      out.failed_ids.push_back(e.cve_id);
    }
    s.source_id = e.cve_id;
    out.corpus.push_back(std::move(s));
  }
  return out;
}

}  // namespace cpeid
