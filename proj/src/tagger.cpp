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

#include "cpeid/tagger.hpp"

#include <algorithm>
#include <cctype>
#include <exception>
#include <map>
#include <numeric>
#include <random>

#include "cpeid/error.hpp"

namespace cpeid {
namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::size_t> label_indices(std::span<const BioLabel> labels) {
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const BioLabel& l : labels) out.push_back(label_index(l));
  return out;
}

std::vector<BioLabel> to_labels(std::span<const std::size_t> path) {
  std::vector<BioLabel> out;
  out.reserve(path.size());
  for (const std::size_t y : path) out.push_back(label_at(y));
  return out;
}

json scores_to_json(const LabelScores& scores) {
  json arr = json::array();
  for (const double w : scores) arr.push_back(w);
  return arr;
}

LabelScores scores_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() != kLabelCount) {
    throw ModelFormatError("model: " + where + " must hold " +
                           std::to_string(kLabelCount) + " weights");
  }
  LabelScores out{};
  for (std::size_t i = 0; i < kLabelCount; ++i) out[i] = arr[i].get<double>();
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Features

std::string_view token_shape(std::string_view token) {
  if (token.empty()) return "mixed";
  bool all_digit = true, all_punct = true, all_lower = true, all_upper = true;
  bool all_alpha = true;
  for (const char ch : token) {
    const auto c = static_cast<unsigned char>(ch);
    all_digit &= std::isdigit(c) != 0;
    all_punct &= c < 0x80 && std::ispunct(c) != 0;
    all_alpha &= std::isalpha(c) != 0;
    all_lower &= std::islower(c) != 0;
    all_upper &= std::isupper(c) != 0;
  }
  if (all_digit) return "dd";
  if (is_dotted_numeric(token)) return "d.d";
  if (all_punct) return "punct";
  if (all_lower) return "xx";
  if (all_upper) return token.size() == 1 ? "Xx" : "XX";
  const auto first = static_cast<unsigned char>(token.front());
  if (all_alpha && std::isupper(first) &&
      std::all_of(token.begin() + 1, token.end(), [](char c) {
        return std::islower(static_cast<unsigned char>(c)) != 0;
      })) {
    return "Xx";
  }
  return "mixed";
}

std::vector<std::vector<std::string>> extract_features(
    std::span<const Token> tokens) {
  std::vector<std::string> lowered;
  lowered.reserve(tokens.size());
  for (const Token& t : tokens) lowered.push_back(lower(t.text));

  std::vector<std::vector<std::string>> out(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& w = lowered[i];
    auto& f = out[i];
    f.reserve(16);
    f.emplace_back("bias");
    f.push_back("w=" + w);
    f.push_back("s=" + std::string(token_shape(tokens[i].text)));
    for (std::size_t k = 1; k <= 3 && k <= w.size(); ++k) {
      f.push_back("p" + std::to_string(k) + "=" + w.substr(0, k));
      f.push_back("x" + std::to_string(k) + "=" + w.substr(w.size() - k));
    }
    if (i == 0) {
      f.emplace_back("pw=<s>");
      f.emplace_back("ps=<s>");
      f.emplace_back("first");
    } else {
      f.push_back("pw=" + lowered[i - 1]);
      f.push_back("ps=" + std::string(token_shape(tokens[i - 1].text)));
    }
    if (i + 1 == tokens.size()) {
      f.emplace_back("nw=</s>");
      f.emplace_back("ns=</s>");
    } else {
      f.push_back("nw=" + lowered[i + 1]);
      f.push_back("ns=" + std::string(token_shape(tokens[i + 1].text)));
    }
    if (is_dotted_numeric(tokens[i].text)) f.emplace_back("dn");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decoding

void apply_bio_constraints(TransitionScores& scores) {
  for (std::size_t cur = 0; cur < kLabelCount; ++cur) {
    const BioLabel cur_label = label_at(cur);
    if (!transition_allowed(std::nullopt, cur_label)) scores.start[cur] = kForbidden;
    for (std::size_t prev = 0; prev < kLabelCount; ++prev) {
      if (!transition_allowed(label_at(prev), cur_label)) {
        scores.transitions[prev][cur] = kForbidden;
      }
    }
  }
}

std::vector<std::size_t> viterbi_best_path(std::span<const LabelScores> emissions,
                                           const TransitionScores& scores) {
  const std::size_t n = emissions.size();
  std::vector<std::size_t> path(n);
  if (n == 0) return path;

  // suffix[i][y]: best score of positions i..n-1 given label y at i.
  std::vector<LabelScores> suffix(n);
  suffix[n - 1] = emissions[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    for (std::size_t y = 0; y < kLabelCount; ++y) {
      double best = kForbidden;
      for (std::size_t z = 0; z < kLabelCount; ++z) {
        best = std::max(best, scores.transitions[y][z] + suffix[i + 1][z]);
      }
      suffix[i][y] = emissions[i][y] + best;
    }
  }
  // Forward pass picks the smallest index among maximizers at each step,
  // which yields the lexicographically smallest optimal path.
  auto pick = [&](const LabelScores& incoming, const LabelScores& rest) {
    std::size_t arg = 0;
    double best = incoming[0] + rest[0];
    for (std::size_t y = 1; y < kLabelCount; ++y) {
      const double s = incoming[y] + rest[y];
      if (s > best) {
        best = s;
        arg = y;
      }
    }
    return arg;
  };
  path[0] = pick(scores.start, suffix[0]);
  for (std::size_t i = 1; i < n; ++i) {
    path[i] = pick(scores.transitions[path[i - 1]], suffix[i]);
  }
  return path;
}

double path_score(std::span<const LabelScores> emissions,
                  const TransitionScores& scores,
                  std::span<const std::size_t> path) {
  if (path.empty()) return 0.0;
  double total = scores.start[path[0]] + emissions[0][path[0]];
  for (std::size_t i = 1; i < path.size(); ++i) {
    total += scores.transitions[path[i - 1]][path[i]] + emissions[i][path[i]];
  }
  return total;
}

// ---------------------------------------------------------------------------
// Model

TaggerModel::TaggerModel() = default;

std::size_t TaggerModel::intern(const std::string& feature) {
  auto [it, inserted] = index_.emplace(feature, features_.size());
  if (inserted) {
    features_.push_back(feature);
    emissions_.push_back(LabelScores{});
  }
  return it->second;
}

std::size_t TaggerModel::find(const std::string& feature) const {
  auto it = index_.find(feature);
  return it == index_.end() ? npos : it->second;
}

std::vector<LabelScores> TaggerModel::emission_scores(
    const std::vector<std::vector<std::string>>& features) const {
  std::vector<LabelScores> out(features.size(), LabelScores{});
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (const std::string& f : features[i]) {
      const std::size_t id = find(f);
      if (id == npos) continue;
      for (std::size_t y = 0; y < kLabelCount; ++y) out[i][y] += emissions_[id][y];
    }
  }
  return out;
}

std::vector<LabelScores> TaggerModel::emission_scores(
    std::span<const Token> tokens) const {
  return emission_scores(extract_features(tokens));
}

TransitionScores TaggerModel::decode_scores() const {
  TransitionScores scores = transitions_;
  apply_bio_constraints(scores);
  return scores;
}

std::vector<BioLabel> viterbi_decode(const TaggerModel& model,
                                     std::span<const Token> tokens) {
  if (tokens.empty()) return {};
  const auto emissions = model.emission_scores(tokens);
  return to_labels(viterbi_best_path(emissions, model.decode_scores()));
}

TaggerModel train(std::span<const TaggedSentence> corpus, const TrainConfig& config) {
  if (corpus.empty()) throw InvalidArgument("train: corpus is empty");
  if (config.epochs < 1) throw InvalidArgument("train: epochs must be >= 1");

  std::vector<std::string> offenders;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const TaggedSentence& s = corpus[k];
    if (s.tokens.size() != s.labels.size() || !is_bio_valid(s.labels)) {
      offenders.push_back(s.source_id.empty() ? "#" + std::to_string(k) : s.source_id);
    }
  }
  if (!offenders.empty()) {
    std::string list;
    for (std::size_t k = 0; k < offenders.size() && k < 20; ++k) {
      list += (k ? ", " : "") + offenders[k];
    }
    if (offenders.size() > 20) list += ", ...";
    throw LabelSetError("train: " + std::to_string(offenders.size()) +
                        " sentence(s) with labels outside the BIO label set "
                        "or misaligned: " + list);
  }

  TaggerModel model;
  struct Example {
    std::vector<std::vector<std::size_t>> feature_ids;
    std::vector<std::size_t> gold;
  };
  std::vector<Example> examples;
  examples.reserve(corpus.size());
  for (const TaggedSentence& raw : corpus) {
    const TaggedSentence s = strip_padding(raw);
    Example ex;
    ex.gold = label_indices(s.labels);
    for (const auto& feats : extract_features(s.tokens)) {
      std::vector<std::size_t> ids;
      ids.reserve(feats.size());
      for (const std::string& f : feats) ids.push_back(model.intern(f));
      ex.feature_ids.push_back(std::move(ids));
    }
    examples.push_back(std::move(ex));
  }

  const std::size_t feature_count = model.feature_count();
  std::vector<LabelScores> emission_acc(feature_count, LabelScores{});
  TransitionScores transition_acc;
  TransitionScores& transitions = model.transitions();
  double step = 1.0;

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  std::vector<LabelScores> emissions;

  TrainingMeta& meta = model.meta();
  meta.epochs = config.epochs;
  meta.seed = config.seed;
  meta.sentences = corpus.size();
  meta.corpus_fingerprint = fingerprint(write_conll(corpus));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng() % i]);
      }
    }
    std::size_t mistakes = 0;
    for (const std::size_t k : order) {
      const Example& ex = examples[k];
      const std::size_t n = ex.gold.size();
      if (n > 0) {
        emissions.assign(n, LabelScores{});
        for (std::size_t i = 0; i < n; ++i) {
          for (const std::size_t f : ex.feature_ids[i]) {
            const LabelScores& w = model.weights(f);
            for (std::size_t y = 0; y < kLabelCount; ++y) emissions[i][y] += w[y];
          }
        }
        const auto pred = viterbi_best_path(emissions, model.decode_scores());
        if (pred != ex.gold) {
          ++mistakes;
          for (std::size_t i = 0; i < n; ++i) {
            const std::size_t g = ex.gold[i];
            const std::size_t p = pred[i];
            if (g != p) {
              for (const std::size_t f : ex.feature_ids[i]) {
                model.weights(f)[g] += 1.0;
                model.weights(f)[p] -= 1.0;
                emission_acc[f][g] += step;
                emission_acc[f][p] -= step;
              }
            }
            double* gold_t = i == 0 ? &transitions.start[g]
                                    : &transitions.transitions[ex.gold[i - 1]][g];
            double* pred_t = i == 0 ? &transitions.start[p]
                                    : &transitions.transitions[pred[i - 1]][p];
            double* gold_a = i == 0 ? &transition_acc.start[g]
                                    : &transition_acc.transitions[ex.gold[i - 1]][g];
            double* pred_a = i == 0 ? &transition_acc.start[p]
                                    : &transition_acc.transitions[pred[i - 1]][p];
            if (gold_t != pred_t) {
              *gold_t += 1.0;
              *pred_t -= 1.0;
              *gold_a += step;
              *pred_a -= step;
            }
          }
        }
      }
      step += 1.0;
    }
    meta.epoch_mistakes.push_back(mistakes);
  }

  // Averaging: w_avg = w - acc / step.
  for (std::size_t f = 0; f < feature_count; ++f) {
    for (std::size_t y = 0; y < kLabelCount; ++y) {
      model.weights(f)[y] -= emission_acc[f][y] / step;
    }
  }
  for (std::size_t y = 0; y < kLabelCount; ++y) {
    transitions.start[y] -= transition_acc.start[y] / step;
    for (std::size_t z = 0; z < kLabelCount; ++z) {
      transitions.transitions[y][z] -= transition_acc.transitions[y][z] / step;
    }
  }
  return model;
}

std::string save_model(const TaggerModel& model) {
  json doc;
  doc["version"] = kModelFormatVersion;
  json label_set = json::array();
  for (std::size_t y = 0; y < kLabelCount; ++y) label_set.push_back(label_name(label_at(y)));
  doc["label_set"] = label_set;

  json emissions = json::object();
  for (std::size_t f = 0; f < model.feature_count(); ++f) {
    const LabelScores& w = model.weights(f);
    if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) continue;
    emissions[model.feature_name(f)] = scores_to_json(w);
  }
  doc["emissions"] = std::move(emissions);

  json transitions = json::array();
  for (const LabelScores& row : model.transitions().transitions) {
    transitions.push_back(scores_to_json(row));
  }
  doc["transitions"] = std::move(transitions);
  doc["start"] = scores_to_json(model.transitions().start);

  const TrainingMeta& meta = model.meta();
  doc["meta"] = {{"epochs", meta.epochs},
                 {"seed", meta.seed},
                 {"corpus_fingerprint", meta.corpus_fingerprint},
                 {"sentences", meta.sentences},
                 {"epoch_mistakes", meta.epoch_mistakes}};
  return doc.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

TaggerModel load_model(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ModelFormatError(std::string("model: unreadable model file (") +
                           e.what() + ")");
  }
  if (!doc.is_object() || !doc.contains("version")) {
    throw ModelFormatError("model: missing version field");
  }
  if (!doc["version"].is_string() ||
      doc["version"].get<std::string>() != kModelFormatVersion) {
    throw ModelFormatError("model: version mismatch (file has " +
                           doc["version"].dump() + ", expected \"" +
                           std::string(kModelFormatVersion) + "\")");
  }
  TaggerModel model;
  try {
    const json& labels = doc.at("label_set");
    if (!labels.is_array() || labels.size() != kLabelCount) {
      throw ModelFormatError("model: label_set must list 11 labels");
    }
    for (std::size_t y = 0; y < kLabelCount; ++y) {
      if (labels[y] != label_name(label_at(y))) {
        throw ModelFormatError("model: unexpected label_set order at " +
                               std::to_string(y));
      }
    }
    for (const auto& [feature, weights] : doc.at("emissions").items()) {
      model.weights(model.intern(feature)) = scores_from_json(weights, feature);
    }
    const json& rows = doc.at("transitions");
    if (!rows.is_array() || rows.size() != kLabelCount) {
      throw ModelFormatError("model: transitions must be 11x11");
    }
    for (std::size_t y = 0; y < kLabelCount; ++y) {
      model.transitions().transitions[y] = scores_from_json(rows[y], "transitions");
    }
    model.transitions().start = scores_from_json(doc.at("start"), "start");
    const json& meta = doc.at("meta");
    model.meta().epochs = meta.at("epochs").get<int>();
    model.meta().seed = meta.at("seed").get<std::uint64_t>();
    model.meta().corpus_fingerprint = meta.at("corpus_fingerprint").get<std::string>();
    model.meta().sentences = meta.at("sentences").get<std::size_t>();
    model.meta().epoch_mistakes =
        meta.at("epoch_mistakes").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("model: ") + e.what());
  }
  return model;
}

// ---------------------------------------------------------------------------
// Taggers

LearnedTagger::LearnedTagger(std::shared_ptr<const TaggerModel> model)
    : model_(std::move(model)) {}

std::vector<BioLabel> LearnedTagger::label(std::span<const Token> tokens) const {
  return viterbi_decode(*model_, tokens);
}

json LearnedTagger::meta() const {
  const TrainingMeta& m = model_->meta();
  return {{"epochs", m.epochs},
          {"seed", m.seed},
          {"corpus_fingerprint", m.corpus_fingerprint},
          {"sentences", m.sentences},
          {"features", model_->feature_count()}};
}

GazetteerTagger::GazetteerTagger(Gazetteer gazetteer)
    : gazetteer_(std::move(gazetteer)) {}

std::vector<BioLabel> GazetteerTagger::label(std::span<const Token> tokens) const {
  return annotate_sentence(tokens, gazetteer_).labels;
}

json GazetteerTagger::meta() const {
  json terms = json::object();
  for (const Entity e : {Entity::kVendor, Entity::kProduct, Entity::kUpdate,
                         Entity::kEdition}) {
    terms[std::string(entity_name(e))] = gazetteer_.terms(e).size();
  }
  return {{"terms", terms}};
}

// ---------------------------------------------------------------------------
// Prediction

std::vector<TextSpan> predict(std::string_view text, const Tagger& tagger) {
  const std::vector<Token> tokens = tokenize(text);
  if (tokens.empty()) return {};
  const TaggedSentence labeled = annotate_with_tagger(tokens, tagger);
  std::vector<TextSpan> out;
  for (const EntitySpan& span : bio_to_spans(labeled.labels, tokens)) {
    TextSpan ts;
    ts.entity = span.entity;
    ts.token_start = span.token_start;
    ts.token_end = span.token_end;
    ts.char_start = tokens[span.token_start].char_start;
    ts.char_end = tokens[span.token_end - 1].char_end;
    ts.text = std::string(text.substr(ts.char_start, ts.char_end - ts.char_start));
    out.push_back(std::move(ts));
  }
  return out;
}

namespace {

TaggedSentence tag_one(const TaggedSentence& sentence, const Tagger& tagger) {
  TaggedSentence out = sentence;
  std::vector<Token> content;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (sentence.tokens[i].padding) continue;
    content.push_back(sentence.tokens[i]);
    where.push_back(i);
  }
  out.labels.assign(sentence.tokens.size(), BioLabel::outside());
  if (content.empty()) return out;
  const TaggedSentence labeled = annotate_with_tagger(content, tagger);
  for (std::size_t k = 0; k < where.size(); ++k) out.labels[where[k]] = labeled.labels[k];
  return out;
}

}  // namespace

Corpus tag_corpus(std::span<const TaggedSentence> sentences, const Tagger& tagger) {
  Corpus out(sentences.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(sentences.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] =
          tag_one(sentences[static_cast<std::size_t>(i)], tagger);
    } catch (...) {
#pragma omp critical(cpeid_tag_corpus_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

Corpus tag_corpus_serial(std::span<const TaggedSentence> sentences,
                         const Tagger& tagger) {
  Corpus out;
  out.reserve(sentences.size());
  for (const TaggedSentence& s : sentences) out.push_back(tag_one(s, tagger));
  return out;
}

// ---------------------------------------------------------------------------
// CPE reconstruction

namespace {

// Non-wildcard attributes in an escaped "a:b:c:d" extended suffix.
std::size_t open_extended_fields(std::string_view suffix) {
  std::size_t count = 0;
  std::string field;
  auto flush = [&] {
    if (!is_wildcard(field)) ++count;
    field.clear();
  };
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    if (suffix[i] == '\\' && i + 1 < suffix.size()) {
      field += suffix.substr(i, 2);
      ++i;
    } else if (suffix[i] == ':') {
      flush();
    } else {
      field += suffix[i];
    }
  }
  flush();
  return count;
}

}  // namespace

ReconstructResult cpe_reconstruct(std::span<const EntitySpan> spans,
                                  std::span<const CpeName> dictionary) {
  ReconstructResult result;
  CpeName& cand = result.candidate;
  auto field_for = [&](Entity e) -> std::string& {
    switch (e) {
      case Entity::kVendor:
        return cand.vendor;
      case Entity::kProduct:
        return cand.product;
      case Entity::kVersion:
        return cand.version;
      case Entity::kUpdate:
        return cand.update;
      case Entity::kEdition:
        return cand.edition;
    }
    return cand.edition;
  };
  bool any = false;
  for (const EntitySpan& span : spans) {
    std::string& field = field_for(span.entity);
    if (!is_wildcard(field)) continue;  // first span per entity wins
    std::string value = lower(span.text);
    std::replace(value.begin(), value.end(), ' ', '_');
    if (value.empty()) continue;
    field = std::move(value);
    any = true;
  }
  if (!any) return result;

  const std::pair<const std::string CpeName::*, Entity> kFields[] = {
      {&CpeName::vendor, Entity::kVendor},   {&CpeName::product, Entity::kProduct},
      {&CpeName::version, Entity::kVersion}, {&CpeName::update, Entity::kUpdate},
      {&CpeName::edition, Entity::kEdition}};
  std::vector<std::pair<int, const CpeName*>> ranked;
  for (const CpeName& entry : dictionary) {
    bool match = true;
    int open = 0;
    for (const auto& [member, entity] : kFields) {
      const std::string& want = cand.*member;
      const std::string& have = entry.*member;
      if (is_wildcard(want)) {
        open += is_wildcard(have) ? 0 : 1;
      } else if (lower(have) != want) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    open += is_wildcard(entry.language) ? 0 : 1;
    open += static_cast<int>(open_extended_fields(entry.extended_suffix));
    ranked.emplace_back(open, &entry);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [open, entry] : ranked) result.matches.push_back(*entry);
  result.verified = !result.matches.empty();
  return result;
}

}  // namespace cpeid
