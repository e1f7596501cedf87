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

#ifndef CPEID_AUGMENTOR_HPP_
#define CPEID_AUGMENTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cpeid/corpus.hpp"
#include "cpeid/labels.hpp"

namespace cpeid {

// Supplies one replacement token per masked position.
class SynonymProvider {
 public:
  virtual ~SynonymProvider() = default;
  virtual std::vector<std::string> fill(
      std::span<const std::string> tokens,
      std::span<const std::size_t> mask_positions) const = 0;
};

// Looks tokens up (case-insensitively) in a synonym table. Tokens without an
// entry are returned unchanged. The choice among synonyms is a pure
// function of the sentence and position, so the provider is thread-safe.
class DictionarySynonymProvider : public SynonymProvider {
 public:
  explicit DictionarySynonymProvider(
      std::map<std::string, std::vector<std::string>> table);

  // Curated vocabulary for CVE prose.
  static DictionarySynonymProvider builtin();
  // JSON object {"token": ["synonym", ...], ...}.
  static DictionarySynonymProvider from_json(std::string_view json_text);

  std::vector<std::string> fill(
      std::span<const std::string> tokens,
      std::span<const std::size_t> mask_positions) const override;

  const std::map<std::string, std::vector<std::string>>& table() const {
    return table_;
  }

 private:
  std::map<std::string, std::vector<std::string>> table_;
};

// Returns the masked tokens themselves.
class IdentitySynonymProvider : public SynonymProvider {
 public:
  std::vector<std::string> fill(
      std::span<const std::string> tokens,
      std::span<const std::size_t> mask_positions) const override;
};

struct AugmentConfig {
  std::size_t mask_count = 7;
  std::set<Entity> target_entities = {Entity::kEdition, Entity::kVendor,
                                      Entity::kUpdate};
  std::size_t multiplier = 1;
  std::uint64_t seed = 42;
};

// Throws InvalidArgument for mask_count or multiplier below 1.
void validate(const AugmentConfig& config);

// Sentences with at least one label of a target entity.
Corpus select_target_sentences(std::span<const TaggedSentence> corpus,
                               const std::set<Entity>& target_entities);

struct AugmentOutcome {
  TaggedSentence sentence;
  bool no_op = false;  // no O-labeled token to replace
};

// Replaces min(mask_count, #O tokens) randomly chosen O-labeled, non-padding
// tokens with provider output. Labels and length are unchanged. The RNG is
// seeded with rng_seed; source_id becomes "aug:<index>". Throws
// ProviderContractError on a wrong-arity or malformed provider reply and
// InvalidArgument on an empty sentence.
AugmentOutcome augment_sentence(const TaggedSentence& sentence,
                                const AugmentConfig& config,
                                const SynonymProvider& provider,
                                std::uint64_t rng_seed, std::size_t index);

struct AugmentResult {
  Corpus sentences;
  std::size_t no_ops = 0;
};

// multiplier copies per selected sentence. Output n comes from selected
// sentence n / multiplier and uses RNG seed (config.seed ^ n), so the
// parallel and serial kernels agree exactly.
AugmentResult augment_corpus(std::span<const TaggedSentence> selected,
                             const AugmentConfig& config,
                             const SynonymProvider& provider);
AugmentResult augment_corpus_serial(std::span<const TaggedSentence> selected,
                                    const AugmentConfig& config,
                                    const SynonymProvider& provider);

// ceil(target_count / selected_count), at least 1.
std::size_t multiplier_for_target(std::size_t selected_count,
                                  std::size_t target_count);

// Annotated sentences first, then augmented ones.
Corpus merge_corpora(std::span<const TaggedSentence> annotated,
                     std::span<const TaggedSentence> augmented);

}  // namespace cpeid

#endif  // CPEID_AUGMENTOR_HPP_
