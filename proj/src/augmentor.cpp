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

#include "cpeid/augmentor.hpp"

#include <algorithm>
#include <cctype>
#include <exception>
#include <random>

#include "cpeid/error.hpp"
#include "json.hpp"

namespace cpeid {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::uint64_t mix(std::string_view text, std::uint64_t salt) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ (salt * 0x9e3779b97f4a7c15ULL);
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool is_single_token(std::string_view s) {
  if (s.empty() || s == kPadToken) return false;
  return std::none_of(s.begin(), s.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
  });
}

}  // namespace

DictionarySynonymProvider::DictionarySynonymProvider(
    std::map<std::string, std::vector<std::string>> table) {
  for (auto& [key, synonyms] : table) {
    std::vector<std::string> usable;
    for (std::string& s : synonyms) {
      if (is_single_token(s)) usable.push_back(std::move(s));
    }
    if (!usable.empty()) table_[lower(key)] = std::move(usable);
  }
}

DictionarySynonymProvider DictionarySynonymProvider::builtin() {
  return DictionarySynonymProvider({
      {"allows", {"permits", "enables", "lets"}},
      {"allow", {"permit", "enable", "let"}},
      {"remote", {"distant", "network-based", "external"}},
      {"attackers", {"adversaries", "intruders", "hackers"}},
      {"attacker", {"adversary", "intruder", "hacker"}},
      {"execute", {"run", "perform", "launch"}},
      {"arbitrary", {"unspecified", "chosen", "unrestricted"}},
      {"code", {"instructions", "commands", "payloads"}},
      {"commands", {"instructions", "directives", "operations"}},
      {"cause", {"trigger", "induce", "provoke"}},
      {"denial", {"disruption", "refusal", "deprivation"}},
      {"service", {"availability", "operation", "functionality"}},
      {"crash", {"failure", "abort", "fault"}},
      {"crafted", {"malicious", "specially-crafted", "manipulated"}},
      {"malicious", {"crafted", "hostile", "harmful"}},
      {"via", {"through", "using", "with"}},
      {"vulnerability", {"flaw", "weakness", "issue"}},
      {"vulnerable", {"susceptible", "exposed", "affected"}},
      {"issue", {"problem", "flaw", "defect"}},
      {"overflow", {"overrun", "overrunning", "overflowing"}},
      {"buffer", {"memory", "array", "storage"}},
      {"unspecified", {"unknown", "undisclosed", "other"}},
      {"vectors", {"methods", "means", "routes"}},
      {"multiple", {"several", "various", "numerous"}},
      {"users", {"accounts", "clients", "operators"}},
      {"user", {"account", "client", "operator"}},
      {"local", {"onsite", "logged-in", "authenticated"}},
      {"authenticated", {"logged-in", "authorized", "verified"}},
      {"obtain", {"acquire", "gain", "retrieve"}},
      {"gain", {"obtain", "acquire", "achieve"}},
      {"sensitive", {"confidential", "private", "protected"}},
      {"information", {"data", "details", "content"}},
      {"file", {"document", "resource", "object"}},
      {"files", {"documents", "resources", "objects"}},
      {"request", {"query", "message", "call"}},
      {"requests", {"queries", "messages", "calls"}},
      {"parameter", {"argument", "field", "variable"}},
      {"inject", {"insert", "embed", "introduce"}},
      {"script", {"javascript", "code", "markup"}},
      {"web", {"online", "internet", "site"}},
      {"memory", {"heap", "storage", "buffer"}},
      {"corruption", {"damage", "overwrite", "tampering"}},
      {"improper", {"incorrect", "insufficient", "faulty"}},
      {"validation", {"verification", "checking", "sanitization"}},
      {"input", {"data", "content", "payload"}},
      {"privileges", {"permissions", "rights", "access"}},
      {"bypass", {"circumvent", "evade", "avoid"}},
      {"restrictions", {"limits", "controls", "constraints"}},
      {"access", {"entry", "permission", "reach"}},
      {"affected", {"impacted", "vulnerable", "concerned"}},
      {"component", {"module", "part", "element"}},
      {"function", {"routine", "method", "procedure"}},
      {"related", {"associated", "connected", "linked"}},
      {"earlier", {"older", "prior", "previous"}},
      {"leads", {"results", "contributes", "amounts"}},
      {"possibly", {"potentially", "perhaps", "conceivably"}},
      {"certain", {"specific", "particular", "some"}},
      {"handling", {"processing", "management", "treatment"}},
      {"properly", {"correctly", "adequately", "appropriately"}},
  });
}

DictionarySynonymProvider DictionarySynonymProvider::from_json(
    std::string_view json_text) {
  try {
    const auto doc = nlohmann::json::parse(json_text);
    return DictionarySynonymProvider(
        doc.get<std::map<std::string, std::vector<std::string>>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("synonym dictionary: ") + e.what(), 0);
  }
}

std::vector<std::string> DictionarySynonymProvider::fill(
    std::span<const std::string> tokens,
    std::span<const std::size_t> mask_positions) const {
  std::string context;
  for (const std::string& t : tokens) {
    context += t;
    context += ' ';
  }
  std::vector<std::string> out;
  out.reserve(mask_positions.size());
  for (const std::size_t pos : mask_positions) {
    const std::string& original = tokens[pos];
    auto it = table_.find(lower(original));
    if (it == table_.end()) {
      out.push_back(original);
      continue;
    }
    const auto& synonyms = it->second;
    out.push_back(synonyms[mix(context, pos) % synonyms.size()]);
  }
  return out;
}

std::vector<std::string> IdentitySynonymProvider::fill(
    std::span<const std::string> tokens,
    std::span<const std::size_t> mask_positions) const {
  std::vector<std::string> out;
  out.reserve(mask_positions.size());
  for (const std::size_t pos : mask_positions) out.push_back(tokens[pos]);
  return out;
}

void validate(const AugmentConfig& config) {
  if (config.mask_count < 1) throw InvalidArgument("augment: mask_count must be >= 1");
  if (config.multiplier < 1) throw InvalidArgument("augment: multiplier must be >= 1");
}

Corpus select_target_sentences(std::span<const TaggedSentence> corpus,
                               const std::set<Entity>& target_entities) {
  Corpus out;
  for (const TaggedSentence& s : corpus) {
    const bool hit = std::any_of(s.labels.begin(), s.labels.end(), [&](const BioLabel& l) {
      return !l.is_outside() && target_entities.contains(l.entity);
    });
    if (hit) out.push_back(s);
  }
  return out;
}

AugmentOutcome augment_sentence(const TaggedSentence& sentence,
                                const AugmentConfig& config,
                                const SynonymProvider& provider,
                                std::uint64_t rng_seed, std::size_t index) {
  if (sentence.tokens.empty()) {
    throw InvalidArgument("augment_sentence: sentence has no tokens");
  }
  AugmentOutcome out{sentence, false};
  out.sentence.source_id = "aug:" + std::to_string(index);

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (sentence.labels[i].is_outside() && !sentence.tokens[i].padding) {
      candidates.push_back(i);
    }
  }
  if (candidates.empty()) {
    out.no_op = true;
    return out;
  }
  const std::size_t k = std::min(config.mask_count, candidates.size());
  std::mt19937_64 rng(rng_seed);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t r = j + static_cast<std::size_t>(rng() % (candidates.size() - j));
    std::swap(candidates[j], candidates[r]);
  }
  std::vector<std::size_t> positions(candidates.begin(), candidates.begin() + k);
  std::sort(positions.begin(), positions.end());

  std::vector<std::string> texts;
  texts.reserve(sentence.tokens.size());
  for (const Token& t : sentence.tokens) texts.push_back(t.text);
  const std::vector<std::string> replacements = provider.fill(texts, positions);
  if (replacements.size() != positions.size()) {
    throw ProviderContractError(
        "synonym provider returned " + std::to_string(replacements.size()) +
        " replacements for " + std::to_string(positions.size()) + " masked positions");
  }
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (!is_single_token(replacements[j])) {
      throw ProviderContractError("synonym provider returned \"" + replacements[j] +
                                  "\", which is not a single non-empty token");
    }
    texts[positions[j]] = replacements[j];
  }
  // Offsets of the source text no longer apply once any token changes.
  const bool changed = std::any_of(positions.begin(), positions.end(), [&](std::size_t p) {
    return texts[p] != sentence.tokens[p].text;
  });
  if (changed) out.sentence.tokens = tokens_from_texts(texts);
  return out;
}

AugmentResult augment_corpus(std::span<const TaggedSentence> selected,
                             const AugmentConfig& config,
                             const SynonymProvider& provider) {
  validate(config);
  const std::size_t total = selected.size() * config.multiplier;
  std::vector<AugmentOutcome> outcomes(total);
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      outcomes[idx] = augment_sentence(selected[idx / config.multiplier], config,
                                       provider, config.seed ^ idx, idx);
    } catch (...) {
#pragma omp critical(cpeid_augment_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  AugmentResult result;
  result.sentences.reserve(total);
  for (AugmentOutcome& o : outcomes) {
    if (o.no_op) {
      ++result.no_ops;
    } else {
      result.sentences.push_back(std::move(o.sentence));
    }
  }
  return result;
}

AugmentResult augment_corpus_serial(std::span<const TaggedSentence> selected,
                                    const AugmentConfig& config,
                                    const SynonymProvider& provider) {
  validate(config);
  AugmentResult result;
  std::size_t idx = 0;
  for (const TaggedSentence& s : selected) {
    for (std::size_t m = 0; m < config.multiplier; ++m, ++idx) {
      AugmentOutcome o = augment_sentence(s, config, provider, config.seed ^ idx, idx);
      if (o.no_op) {
        ++result.no_ops;
      } else {
        result.sentences.push_back(std::move(o.sentence));
      }
    }
  }
  return result;
}

std::size_t multiplier_for_target(std::size_t selected_count,
                                  std::size_t target_count) {
  if (selected_count == 0) return 1;
  return std::max<std::size_t>(1, (target_count + selected_count - 1) / selected_count);
}

Corpus merge_corpora(std::span<const TaggedSentence> annotated,
                     std::span<const TaggedSentence> augmented) {
  Corpus out;
  out.reserve(annotated.size() + augmented.size());
  out.insert(out.end(), annotated.begin(), annotated.end());
  out.insert(out.end(), augmented.begin(), augmented.end());
  return out;
}

}  // namespace cpeid
