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

#ifndef CPEID_TAGGER_HPP_
#define CPEID_TAGGER_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cpeid/annotator.hpp"
#include "cpeid/corpus.hpp"
#include "cpeid/cpe.hpp"
#include "cpeid/labels.hpp"
#include "json.hpp"

namespace cpeid {

// Anything that assigns one label per token.
class Tagger {
 public:
  virtual ~Tagger() = default;
  // "learned", "gazetteer" or "external".
  virtual std::string_view kind() const = 0;
  virtual std::vector<BioLabel> label(std::span<const Token> tokens) const = 0;
  virtual nlohmann::json meta() const { return nlohmann::json::object(); }
};

// ---------------------------------------------------------------------------
// Features

// Per-position feature strings over a +-1 token window.
std::vector<std::vector<std::string>> extract_features(
    std::span<const Token> tokens);

// "Xx", "XX", "xx", "dd", "d.d", "punct" or "mixed".
std::string_view token_shape(std::string_view token);

// ---------------------------------------------------------------------------
// Scores and decoding

inline constexpr double kForbidden = -std::numeric_limits<double>::infinity();

using LabelScores = std::array<double, kLabelCount>;

// transitions[prev][cur]; start[cur] scores the first label.
struct TransitionScores {
  std::array<LabelScores, kLabelCount> transitions{};
  LabelScores start{};
};

// Sets every transition that would break BIO (into I-x from anything but
// B-x/I-x, or I-x at sentence start) to kForbidden.
void apply_bio_constraints(TransitionScores& scores);

// Exact argmax of sum(emission) + start + sum(transition). Among equal
// scores the lexicographically smallest label-index sequence wins.
std::vector<std::size_t> viterbi_best_path(std::span<const LabelScores> emissions,
                                           const TransitionScores& scores);

// Score of one label path under the same model (kForbidden if invalid).
double path_score(std::span<const LabelScores> emissions,
                  const TransitionScores& scores,
                  std::span<const std::size_t> path);

// ---------------------------------------------------------------------------
// Model

struct TrainingMeta {
  int epochs = 0;
  std::uint64_t seed = 0;
  std::string corpus_fingerprint;
  std::size_t sentences = 0;
  std::vector<std::size_t> epoch_mistakes;

  bool operator==(const TrainingMeta&) const = default;
};

class TaggerModel {
 public:
  TaggerModel();

  // Adds the feature if absent; returns its id.
  std::size_t intern(const std::string& feature);
  // nullopt-like sentinel: npos when unknown.
  std::size_t find(const std::string& feature) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t feature_count() const { return features_.size(); }
  const std::string& feature_name(std::size_t id) const { return features_[id]; }

  LabelScores& weights(std::size_t feature_id) { return emissions_[feature_id]; }
  const LabelScores& weights(std::size_t feature_id) const {
    return emissions_[feature_id];
  }

  // Learned weights; BIO constraints are applied at decode time, not stored.
  TransitionScores& transitions() { return transitions_; }
  const TransitionScores& transitions() const { return transitions_; }

  TrainingMeta& meta() { return meta_; }
  const TrainingMeta& meta() const { return meta_; }

  std::vector<LabelScores> emission_scores(std::span<const Token> tokens) const;
  std::vector<LabelScores> emission_scores(
      const std::vector<std::vector<std::string>>& features) const;

  // Constrained transitions used by decode.
  TransitionScores decode_scores() const;

 private:
  std::vector<std::string> features_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<LabelScores> emissions_;
  TransitionScores transitions_;
  TrainingMeta meta_;
};

struct TrainConfig {
  int epochs = 20;
  std::uint64_t seed = 42;
  bool shuffle = true;
};

// Averaged structured perceptron over Viterbi best paths. Throws
// InvalidArgument on an empty corpus or epochs < 1 and LabelSetError naming
// the offending sentences when labels are misaligned or not valid BIO.
TaggerModel train(std::span<const TaggedSentence> corpus, const TrainConfig& config);

// Always BIO-valid; empty tokens give empty labels.
std::vector<BioLabel> viterbi_decode(const TaggerModel& model,
                                     std::span<const Token> tokens);

inline constexpr std::string_view kModelFormatVersion = "cpeid-tagger/1";

// JSON {version, label_set, emissions, transitions, start, meta}.
std::string save_model(const TaggerModel& model);
// Throws ModelFormatError on truncated input or a version mismatch.
TaggerModel load_model(std::string_view bytes);

// ---------------------------------------------------------------------------
// Tagger implementations

class LearnedTagger : public Tagger {
 public:
  explicit LearnedTagger(std::shared_ptr<const TaggerModel> model);
  std::string_view kind() const override { return "learned"; }
  std::vector<BioLabel> label(std::span<const Token> tokens) const override;
  nlohmann::json meta() const override;
  const TaggerModel& model() const { return *model_; }

 private:
  std::shared_ptr<const TaggerModel> model_;
};

class GazetteerTagger : public Tagger {
 public:
  explicit GazetteerTagger(Gazetteer gazetteer);
  std::string_view kind() const override { return "gazetteer"; }
  std::vector<BioLabel> label(std::span<const Token> tokens) const override;
  nlohmann::json meta() const override;

 private:
  Gazetteer gazetteer_;
};

// Labels every token O.
class ConstantOTagger : public Tagger {
 public:
  std::string_view kind() const override { return "constant"; }
  std::vector<BioLabel> label(std::span<const Token> tokens) const override {
    return std::vector<BioLabel>(tokens.size());
  }
};

// ---------------------------------------------------------------------------
// Prediction

struct TextSpan {
  Entity entity = Entity::kEdition;
  std::size_t char_start = 0;
  std::size_t char_end = 0;  // exclusive
  std::string text;          // source text[char_start, char_end)
  std::size_t token_start = 0;
  std::size_t token_end = 0;

  bool operator==(const TextSpan&) const = default;
};

// tokenize -> tagger -> repair_bio -> spans with character offsets.
std::vector<TextSpan> predict(std::string_view text, const Tagger& tagger);

// Labels each sentence (padding excluded) with the tagger. Parallel over
// sentences; the serial variant is the reference.
Corpus tag_corpus(std::span<const TaggedSentence> sentences, const Tagger& tagger);
Corpus tag_corpus_serial(std::span<const TaggedSentence> sentences,
                         const Tagger& tagger);

// ---------------------------------------------------------------------------
// CPE reconstruction

struct ReconstructResult {
  CpeName candidate;
  // Dictionary entries agreeing with every non-wildcard candidate field,
  // best first (fewest non-wildcard fields, extended attributes included,
  // where the candidate left a wildcard). When empty the
  // candidate is returned unverified.
  std::vector<CpeName> matches;
  bool verified = false;

  // matches.front() if verified, the candidate otherwise.
  const CpeName& best() const { return verified ? matches.front() : candidate; }
};

// Spans -> candidate CPE (first span per entity; lowercased, spaces to
// underscores), then dictionary lookup.
ReconstructResult cpe_reconstruct(std::span<const EntitySpan> spans,
                                  std::span<const CpeName> dictionary);

}  // namespace cpeid

#endif  // CPEID_TAGGER_HPP_
