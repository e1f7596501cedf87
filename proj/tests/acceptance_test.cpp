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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "cpeid/augmentor.hpp"
#include "cpeid/corpus.hpp"
#include "cpeid/cpe.hpp"
#include "cpeid/error.hpp"
#include "cpeid/eval.hpp"
#include "cpeid/labels.hpp"
#include "cpeid/tagger.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace cpeid;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome fail(std::string detail) { return {false, std::move(detail)}; }
Outcome pass(std::string detail) { return {true, std::move(detail)}; }

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome f1_consistency() {
  struct Row {
    double p, r, f;
  };
  std::string detail;
  bool ok = true;
  for (const Row row : {Row{0.9483, 0.9614, 0.9548}, Row{0.9471, 0.9615, 0.9543}}) {
    const double got = f1(row.p, row.r);
    ok = ok && std::fabs(got - row.f) <= 1e-4;
    detail += "f1(" + fixed(row.p) + ", " + fixed(row.r) + ") = " + fixed(got, 6) + " ";
  }
  detail += "(tolerance 0.0001)";
  return {ok, detail};
}

Outcome metric_oracle() {
  std::mt19937_64 rng(20240101);
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const auto pair = testing::random_corpus_pair(rng, 20, 30);
    const EvalReport r = classification_report(pair.gold, pair.pred);
    const auto o = testing::brute_force_metrics(pair.gold, pair.pred);
    const std::string where = "trial " + std::to_string(t) + ": ";
    if (r.accuracy != o.accuracy) return fail(where + "accuracy");
    if (r.macro_f1 != o.macro_f1) return fail(where + "macro F1");
    if (r.micro.precision != o.micro_precision) return fail(where + "micro precision");
    if (r.micro.recall != o.micro_recall) return fail(where + "micro recall");
    if (r.micro.f1 != o.micro_f1) return fail(where + "micro F1");
    for (const Entity e : kAllEntities) {
      const auto x = static_cast<std::size_t>(e);
      const ClassMetrics& m = r.per_class.at(e);
      if (m.precision != o.class_precision[x] || m.recall != o.class_recall[x] ||
          m.f1 != o.class_f1[x]) {
        return fail(where + "per-class " + std::string(entity_name(e)));
      }
    }
  }
  return pass(std::to_string(trials) + " random corpora, exact equality");
}

Outcome viterbi_exactness() {
  std::mt19937_64 rng(77);
  const std::vector<std::string> vocab = {"Adobe", "Flash", "before", "10.1", "crash", ".", "iOS", "XSS"};
  const int models = 200;
  std::size_t sentences = 0;
  for (int k = 0; k < models; ++k) {
    TaggerModel model;
    const int range = k % 3 == 0 ? 1 : 3;  // small ranges force ties
    auto draw = [&] { return static_cast<double>(static_cast<int>(rng() % (2 * range + 1)) - range); };
    std::vector<std::vector<Token>> batch;
    for (std::size_t len = 1; len <= 6; ++len) {
      std::vector<std::string> words;
      for (std::size_t i = 0; i < len; ++i) words.push_back(vocab[rng() % vocab.size()]);
      batch.push_back(tokens_from_texts(words));
      for (const auto& feats : extract_features(batch.back())) {
        for (const auto& f : feats) model.intern(f);
      }
    }
    for (std::size_t id = 0; id < model.feature_count(); ++id) {
      for (double& w : model.weights(id)) w = draw();
    }
    for (auto& row : model.transitions().transitions) {
      for (double& v : row) v = draw();
    }
    for (double& v : model.transitions().start) v = draw();

    const TransitionScores scores = model.decode_scores();
    for (const auto& tokens : batch) {
      const auto emissions = model.emission_scores(tokens);
      const auto want = testing::brute_force_best_path(emissions, scores);
      std::vector<std::size_t> got;
      for (const BioLabel l : viterbi_decode(model, tokens)) got.push_back(label_index(l));
      if (got != want) {
        return fail("model " + std::to_string(k) + ", length " + std::to_string(tokens.size()));
      }
      ++sentences;
    }
  }
  return pass(std::to_string(models) + " models, " + std::to_string(sentences) +
              " sentences of length 1..6, exhaustive search");
}

Outcome bio_round_trip() {
  std::mt19937_64 rng(5);
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) words.push_back("w" + std::to_string(rng() % 50));
    const auto tokens = tokens_from_texts(words);

    std::vector<EntitySpan> spans;
    for (std::size_t i = 0; i < n;) {
      if (rng() % 3 == 0) {
        const std::size_t len = 1 + rng() % std::min<std::size_t>(4, n - i);
        const Entity e = kAllEntities[rng() % kEntityCount];
        spans.push_back({e, i, i + len, join_tokens(tokens, i, i + len)});
        i += len;
      } else {
        ++i;
      }
    }
    const auto labels = spans_to_bio(tokens, spans);
    if (bio_to_spans(labels, tokens) != spans) return fail("spans -> labels -> spans, trial " + std::to_string(t));

    const auto bio = testing::random_bio(rng, n);
    if (spans_to_bio(tokens, bio_to_spans(bio, tokens)) != bio) {
      return fail("labels -> spans -> labels, trial " + std::to_string(t));
    }
  }
  for (int t = 0; t < trials; ++t) {
    const auto raw = testing::random_labels(rng, rng() % 31);
    const auto once = repair_bio(raw);
    if (!is_bio_valid(once) || repair_bio(once) != once || once.size() != raw.size()) {
      return fail("repair_bio, trial " + std::to_string(t));
    }
    if (is_bio_valid(raw) && once != raw) return fail("repair_bio changed a valid sequence");
  }
  return pass(std::to_string(trials) + " span sets both directions, " + std::to_string(trials) +
              " repair_bio sequences");
}

Outcome padding() {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 1 + rng() % 300;
    std::vector<std::string> words(n, "x");
    TaggedSentence s{tokens_from_texts(words), std::vector<BioLabel>(n), ""};
    const TaggedSentence p = pad_or_trim(s);
    if (p.size() != 128 || p.labels.size() != 128) return fail("length " + std::to_string(n));
  }
  Corpus corpus;
  auto make = [](std::size_t n) {
    std::vector<std::string> words(n, "x");
    return TaggedSentence{tokens_from_texts(words), std::vector<BioLabel>(n), ""};
  };
  for (int i = 0; i < 9396; ++i) corpus.push_back(make(100));
  for (int i = 0; i < 604; ++i) corpus.push_back(make(200));
  const CorpusStats stats = compute_stats(corpus);
  const bool ok = stats.fraction_below_max_len == 0.9396;
  return {ok, "2000 sentences padded/trimmed to 128; fraction_below_max_len = " +
                  fixed(stats.fraction_below_max_len, 6)};
}

Outcome augmentation_safety() {
  const auto dict = testing::dictionary_names();
  const std::size_t wanted = 13288;
  const AugmentConfig config{7, {Entity::kEdition, Entity::kVendor, Entity::kUpdate}, 15, 42};

  // Target-bearing templated sentences interleaved with product/version-only
  // sentences that the selection rule must skip.
  Corpus corpus;
  const Corpus rich = testing::synthetic_corpus(dict, wanted, 1234);
  const Corpus plain = testing::synthetic_corpus(dict, 3000, 4321);
  std::size_t p = 0;
  for (std::size_t i = 0; i < rich.size(); ++i) {
    corpus.push_back(rich[i]);
    if (i % 4 == 0 && p < plain.size()) {
      TaggedSentence s = plain[p++];
      for (BioLabel& l : s.labels) {
        if (!l.is_outside() && config.target_entities.contains(l.entity)) l = BioLabel::outside();
      }
      s.labels = repair_bio(s.labels);
      corpus.push_back(std::move(s));
    }
  }
  const Corpus selected = select_target_sentences(corpus, config.target_entities);
  if (selected.size() != wanted) {
    return fail("selected " + std::to_string(selected.size()) + " of " + std::to_string(corpus.size()));
  }
  const auto provider = DictionarySynonymProvider::builtin();
  const AugmentResult result = augment_corpus(selected, config, provider);
  if (result.sentences.size() != wanted * config.multiplier) return fail("wrong output count");
  std::size_t changed_tokens = 0;
  for (std::size_t n = 0; n < result.sentences.size(); ++n) {
    const TaggedSentence& src = selected[n / config.multiplier];
    const TaggedSentence& out = result.sentences[n];
    if (out.size() != src.size() || out.labels != src.labels) {
      return fail("labels or length changed at output " + std::to_string(n));
    }
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (out.tokens[i].text == src.tokens[i].text) continue;
      if (!src.labels[i].is_outside()) return fail("entity token replaced at output " + std::to_string(n));
      ++changed_tokens;
    }
  }
  const auto before = count_entity_tokens(corpus);
  const auto after = count_entity_tokens(merge_corpora(corpus, result.sentences));
  for (const Entity e : config.target_entities) {
    const std::size_t b = before.contains(e) ? before.at(e) : 0;
    const std::size_t a = after.contains(e) ? after.at(e) : 0;
    if (!(a > b)) return fail(std::string(entity_name(e)) + " count did not increase");
  }
  return pass(std::to_string(wanted) + " selected x" + std::to_string(config.multiplier) + " = " +
              std::to_string(result.sentences.size()) + " sentences, " + std::to_string(changed_tokens) +
              " O tokens replaced, 0 entity tokens touched");
}

Outcome cpe_round_trip() {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 1000; ++t) {
    const CpeName name = testing::random_cpe_name(rng);
    const std::string uri = format_cpe_uri(name);
    if (!(parse_cpe_uri(uri) == name) || format_cpe_uri(parse_cpe_uri(uri)) != uri) {
      return fail("random name " + uri);
    }
  }
  const auto uris = testing::dictionary_uris();
  for (const std::string& uri : uris) {
    if (format_cpe_uri(parse_cpe_uri(uri)) != uri) return fail("dictionary entry " + uri);
  }
  const auto dict = testing::dictionary_names();
  std::size_t fixtures = 0;
  for (std::size_t i = 0; i < dict.size(); ++i) {
    if (!testing::templatable(dict[i])) continue;
    ++fixtures;
    const TaggedSentence s = testing::templated_sentence(dict[i], i);
    const ReconstructResult r = cpe_reconstruct(bio_to_spans(s.labels, s.tokens), dict);
    if (!r.verified || !(r.best() == dict[i])) {
      return fail("reconstruct " + format_cpe_uri(dict[i]) + " -> " + format_cpe_uri(r.best()));
    }
  }
  return pass("1000 random names, " + std::to_string(uris.size()) + " dictionary entries, " +
              std::to_string(fixtures) + "/" + std::to_string(fixtures) + " reconstructions");
}

Outcome synthetic_training() {
  const auto dict = testing::dictionary_names();
  const Corpus corpus = testing::synthetic_corpus(dict, 2000, 2024);
  std::set<std::string> vocabulary;
  for (const auto& s : corpus) {
    for (const EntitySpan& span : bio_to_spans(s.labels, s.tokens)) {
      if (span.entity == Entity::kVendor || span.entity == Entity::kProduct) {
        vocabulary.insert(span.text);
      }
    }
  }
  std::set<Entity> kinds;
  for (const auto& [e, count] : count_entity_tokens(corpus)) {
    if (count > 0) kinds.insert(e);
  }
  if (vocabulary.size() < 200) return fail("vocabulary " + std::to_string(vocabulary.size()));
  if (kinds.size() != kEntityCount) return fail("entity types " + std::to_string(kinds.size()));

  const Split split = split_train_test(corpus, 0.2, 2024);
  const TaggerModel model = train(split.train, {20, 2024, true});
  const Corpus predicted = tag_corpus(split.test, LearnedTagger(std::make_shared<TaggerModel>(model)));
  const EvalReport r = classification_report(split.test, predicted);
  const bool ok = r.micro.f1 >= 0.90 && r.span.f1 >= 0.85;
  return {ok, std::to_string(split.train.size()) + "/" + std::to_string(split.test.size()) +
                  " split, vocabulary " + std::to_string(vocabulary.size()) + ", micro F1 " +
                  fixed(r.micro.f1) + " (>= 0.90), span F1 " + fixed(r.span.f1) + " (>= 0.85)"};
}

Outcome cli_determinism() {
  const nlohmann::json config = {{"corpus", {{"seed", 11}}},
                                 {"augment", {{"multiplier", 3}, {"seed", 11}}},
                                 {"train", {{"epochs", 10}, {"seed", 11}}}};
  std::vector<fs::path> runs;
  for (const char* name : {"determinism-a", "determinism-b"}) {
    const fs::path ws = testing::make_workspace(name, config);
    for (const std::string& stage : testing::pipeline_stages()) {
      const auto r = testing::run_cli({stage}, ws);
      if (r.exit_code != 0) return fail(stage + " exited " + std::to_string(r.exit_code) + ": " + r.err);
    }
    runs.push_back(ws);
  }
  std::size_t files = 0;
  for (const char* dir : {"corpus", "models"}) {
    std::set<std::string> names_a, names_b;
    for (const auto& e : fs::directory_iterator(runs[0] / dir)) names_a.insert(e.path().filename());
    for (const auto& e : fs::directory_iterator(runs[1] / dir)) names_b.insert(e.path().filename());
    if (names_a != names_b) return fail(std::string(dir) + " file sets differ");
    for (const std::string& f : names_a) {
      const std::string a = testing::slurp(runs[0] / dir / f);
      const std::string b = testing::slurp(runs[1] / dir / f);
      if (a != b) return fail(std::string(dir) + "/" + f + " differs at " + testing::first_difference(a, b));
      ++files;
    }
  }
  for (const fs::path& ws : runs) fs::remove_all(ws);
  return pass(std::to_string(files) + " artifacts byte-identical across two runs");
}

Outcome error_taxonomy() {
  auto sentence = [](const std::vector<std::string>& words, const std::vector<std::string>& names,
                     const std::string& id) {
    TaggedSentence s;
    s.tokens = tokens_from_texts(words);
    for (const auto& n : names) s.labels.push_back(*parse_label(n));
    s.source_id = id;
    return s;
  };
  const TaggedSentence dot = sentence({"SQL", "injection", "in", "Acme", "Portal", ".", "Reported"},
                                      {"O", "O", "O", "B-vendor", "B-product", "B-vendor", "O"}, "dot");
  TaggedSentence dot_pred = dot;
  dot_pred.labels[5] = BioLabel::outside();
  std::vector<BioLabel> dot_evidence = dot.labels;
  dot_evidence[5] = BioLabel::outside();

  const TaggedSentence dots = sentence({"traverse", "directories", "via", "..", "in", "Acme"},
                                       {"O", "O", "O", "O", "O", "B-vendor"}, "dotdot");
  TaggedSentence dots_pred = dots;
  dots_pred.labels[3] = BioLabel::begin(Entity::kProduct);

  const Corpus gold = {dot, dots};
  const Corpus pred = {dot_pred, dots_pred};
  const std::vector<std::string> raw = {"SQL injection in Acme Portal . Reported",
                                        "traverse directories via .. in Acme"};
  const std::vector<std::vector<BioLabel>> evidence = {dot_evidence, {}};
  const auto cases = error_analysis(gold, pred, raw, evidence);
  if (cases.size() != 2) return fail(std::to_string(cases.size()) + " error cases");
  const bool ok = cases[0].category == ErrorCategory::kGroundTruthSuspect &&
                  cases[1].category == ErrorCategory::kTokenizationMismatch;
  return {ok, "'.' as B-vendor -> " + std::string(category_name(cases[0].category)) + ", '..' as one token -> " +
                  std::string(category_name(cases[1].category))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"f1 self-consistency", f1_consistency},
      {"metric oracle suite", metric_oracle},
      {"viterbi exactness", viterbi_exactness},
      {"bio round-trip", bio_round_trip},
      {"padding/trimming", padding},
      {"augmentation safety", augmentation_safety},
      {"cpe round-trip", cpe_round_trip},
      {"desk-scale training", synthetic_training},
      {"cli determinism", cli_determinism},
      {"error-analysis taxonomy", error_taxonomy},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << " [" << fixed(secs, 1)
              << "s]" << std::endl;
    failures += o.pass ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
