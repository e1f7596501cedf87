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

#include "cpeid/eval.hpp"

#include <gtest/gtest.h>

#include <random>

#include "cpeid/error.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace cpeid {
namespace {

std::vector<BioLabel> labels(const std::vector<std::string>& names) {
  std::vector<BioLabel> out;
  for (const auto& n : names) out.push_back(*parse_label(n));
  return out;
}

TaggedSentence sentence(const std::vector<std::string>& words,
                        const std::vector<std::string>& names, std::string id = "") {
  TaggedSentence s;
  s.tokens = tokens_from_texts(words);
  s.labels = labels(names);
  s.source_id = std::move(id);
  return s;
}

TEST(Formulas, Precision) {
  EXPECT_DOUBLE_EQ(precision({3, 1, 0, 0}).value, 0.75);
  const Ratio r = precision({0, 0, 4, 2});
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.undefined);
}

TEST(Formulas, Recall) {
  EXPECT_DOUBLE_EQ(recall({3, 0, 1, 0}).value, 0.75);
  const Ratio r = recall({0, 5, 0, 1});
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.undefined);
}

TEST(Formulas, Accuracy) {
  EXPECT_DOUBLE_EQ(accuracy({1, 1, 1, 97}).value, 0.98);
  EXPECT_DOUBLE_EQ(accuracy({4, 0, 0, 6}).value, 1.0);
  EXPECT_TRUE(accuracy({}).undefined);
}

TEST(Formulas, ReferenceF1Values) {
  EXPECT_NEAR(f1(0.9483, 0.9614), 0.9548, 1e-4);
  EXPECT_NEAR(f1(0.9471, 0.9615), 0.9543, 1e-4);
  EXPECT_NEAR(f1(0.8916, 0.9069), 0.8992, 1e-4);
}

TEST(Formulas, F1Bounds) {
  EXPECT_DOUBLE_EQ(f1(0.6, 0.6), 0.6);
  EXPECT_EQ(f1(0.0, 0.0), 0.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(1e-6, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(rng), r = u(rng);
    const double v = f1(p, r);
    EXPECT_GE(v, std::min(p, r) - 1e-12);
    EXPECT_LE(v, std::max(p, r) + 1e-12);
    EXPECT_LE(v, (p + r) / 2 + 1e-12);
  }
}

TEST(Counts, MatchBruteForce) {
  std::mt19937_64 rng(2);
  for (int iter = 0; iter < 200; ++iter) {
    const auto pair = testing::random_corpus_pair(rng, 20, 30);
    const TokenCounts c = count_tokens(pair.gold, pair.pred);
    ASSERT_EQ(c, count_tokens_serial(pair.gold, pair.pred));
    const auto o = testing::brute_force_metrics(pair.gold, pair.pred);
    for (std::size_t x = 0; x < kEntityCount; ++x) {
      EXPECT_EQ(c.per_class[x].tp, o.per_class[x].tp);
      EXPECT_EQ(c.per_class[x].fp, o.per_class[x].fp);
      EXPECT_EQ(c.per_class[x].fn, o.per_class[x].fn);
      EXPECT_EQ(c.per_class[x].tn, o.per_class[x].tn);
    }
    EXPECT_EQ(c.pooled.tp, o.pooled.tp);
    EXPECT_EQ(c.pooled.fp, o.pooled.fp);
    EXPECT_EQ(c.pooled.fn, o.pooled.fn);
    EXPECT_EQ(c.pooled.tn, o.pooled.tn);
    EXPECT_EQ(c.span_tp, o.span_tp);
    EXPECT_EQ(c.span_fp, o.span_fp);
    EXPECT_EQ(c.span_fn, o.span_fn);
  }
}

TEST(Counts, SixTokenExample) {
  const Corpus gold = {sentence({"a", "b", "c", "d", "e", "f"},
                                {"B-vendor", "B-product", "I-product", "O", "B-version", "O"})};
  const Corpus pred = {sentence({"a", "b", "c", "d", "e", "f"},
                                {"B-vendor", "B-product", "O", "B-version", "B-version", "O"})};
  const TokenCounts c = count_tokens(gold, pred);
  EXPECT_EQ(c.pooled, (ConfusionCounts{3, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(precision(c.pooled).value, 0.75);
  EXPECT_DOUBLE_EQ(recall(c.pooled).value, 0.75);
  EXPECT_DOUBLE_EQ(accuracy(c.pooled).value, 4.0 / 6.0);
}

TEST(Counts, MisalignedNamesSentence) {
  const Corpus gold = {sentence({"a"}, {"O"}, "s0"), sentence({"a", "b"}, {"O", "O"}, "CVE-1")};
  const Corpus pred = {sentence({"a"}, {"O"}, "s0"), sentence({"a"}, {"O"}, "CVE-1")};
  try {
    count_tokens(gold, pred);
    FAIL() << "expected AlignmentError";
  } catch (const AlignmentError& e) {
    EXPECT_NE(std::string(e.what()).find("CVE-1"), std::string::npos);
  }
  EXPECT_THROW(count_tokens(gold, Corpus{gold[0]}), AlignmentError);
}

TEST(Report, IdentityIsPerfect) {
  const Corpus gold = testing::synthetic_corpus(testing::dictionary_names(), 50, 5);
  const EvalReport r = classification_report(gold, gold);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.macro_f1, 1.0);
  EXPECT_EQ(r.micro.f1, 1.0);
  EXPECT_EQ(r.span.f1, 1.0);
  for (const auto& [e, m] : r.per_class) {
    EXPECT_EQ(m.f1, 1.0) << entity_name(e);
    EXPECT_FALSE(m.undefined);
  }
}

TEST(Report, EntityFreeIdentityIsFlaggedNotPerfect) {
  const Corpus gold = {sentence({"a", "b"}, {"O", "O"})};
  const EvalReport r = classification_report(gold, gold);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_TRUE(r.macro_undefined);
  EXPECT_TRUE(r.micro.precision_undefined);
  EXPECT_TRUE(r.micro.recall_undefined);
}

TEST(Report, SingleVendorMiss) {
  const Corpus gold = {sentence({"Adobe", "Flash", "Player", "10.1", "crash"},
                                {"B-vendor", "B-product", "I-product", "B-version", "O"})};
  Corpus pred = gold;
  pred[0].labels[0] = BioLabel::outside();
  const EvalReport r = classification_report(gold, pred);
  const ClassMetrics& vendor = r.per_class.at(Entity::kVendor);
  EXPECT_EQ(vendor.precision, 0.0);
  EXPECT_EQ(vendor.recall, 0.0);
  EXPECT_EQ(vendor.f1, 0.0);
  EXPECT_EQ(vendor.support, 1u);
  EXPECT_EQ(r.per_class.at(Entity::kProduct).f1, 1.0);
  EXPECT_EQ(r.per_class.at(Entity::kProduct).support, 2u);
  EXPECT_EQ(r.per_class.at(Entity::kVersion).f1, 1.0);
  EXPECT_TRUE(r.per_class.at(Entity::kEdition).undefined);
  EXPECT_DOUBLE_EQ(r.macro_f1, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.micro.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.micro.recall, 0.75);
  EXPECT_DOUBLE_EQ(r.micro.f1, 6.0 / 7.0);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.8);
  EXPECT_DOUBLE_EQ(r.span.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.span.recall, 2.0 / 3.0);
  EXPECT_EQ(r.evaluated_tokens, 5u);
}

TEST(Report, MacroAndMicroDivergeOnSkew) {
  std::vector<std::string> words(100, "w"), gold_names, pred_names;
  for (int i = 0; i < 90; ++i) gold_names.push_back("B-product");
  for (int i = 0; i < 10; ++i) gold_names.push_back("B-vendor");
  pred_names = gold_names;
  for (int i = 90; i < 100; ++i) pred_names[i] = "O";
  const EvalReport r =
      classification_report(Corpus{sentence(words, gold_names)}, Corpus{sentence(words, pred_names)});
  EXPECT_DOUBLE_EQ(r.macro_f1, 0.5);
  EXPECT_DOUBLE_EQ(r.micro.f1, 2.0 * 0.9 / 1.9);
  EXPECT_GT(r.micro.f1, r.macro_f1);
}

TEST(Report, SupportsSumToGoldEntityTokens) {
  std::mt19937_64 rng(4);
  for (int iter = 0; iter < 50; ++iter) {
    const auto pair = testing::random_corpus_pair(rng, 10, 20);
    const EvalReport r = classification_report(pair.gold, pair.pred);
    std::size_t support = 0, gold_entities = 0;
    for (const auto& [e, m] : r.per_class) support += m.support;
    for (const auto& s : pair.gold) {
      for (std::size_t i = 0; i < s.size(); ++i) gold_entities += !s.tokens[i].padding && !s.labels[i].is_outside();
    }
    EXPECT_EQ(support, gold_entities);
    EXPECT_GE(r.accuracy, 0.0);
    EXPECT_LE(r.accuracy, 1.0);
  }
}

TEST(Report, PaddingExcluded) {
  const TaggedSentence g = pad_or_trim(sentence({"Adobe", "x"}, {"B-vendor", "O"}), 10);
  TaggedSentence p = g;
  p.labels[5] = BioLabel::begin(Entity::kProduct);
  const EvalReport r = classification_report(Corpus{g}, Corpus{p});
  EXPECT_EQ(r.evaluated_tokens, 2u);
  EXPECT_EQ(r.accuracy, 1.0);
}

TEST(Report, JsonAndText) {
  const Corpus gold = {sentence({"Adobe", "Flash"}, {"B-vendor", "B-product"}, "CVE-1")};
  Corpus pred = gold;
  pred[0].labels[1] = BioLabel::outside();
  EvalReport r = classification_report(gold, pred);
  r.error_cases = error_analysis(gold, pred, {});
  const auto j = report_to_json(r);
  for (const char* key : {"per_class", "macro_f1", "micro", "accuracy", "errors", "entity_span"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  ASSERT_EQ(j["errors"].size(), 1u);
  EXPECT_EQ(j["errors"][0]["category"], "model_error");
  EXPECT_EQ(j["errors"][0]["gold_label"], "B-product");
  EXPECT_EQ(report_to_json(r, 0)["errors"].size(), 0u);
  const std::string text = render_report(r);
  EXPECT_NE(text.find("vendor"), std::string::npos);
  EXPECT_NE(text.find("macro"), std::string::npos);
}

TEST(ErrorAnalysis, Taxonomy) {
  // Gold labels a "." as vendor while the gazetteer evidence says O.
  const std::string raw1 = "Heap overflow in Acme Viewer . Fixed later";
  const TaggedSentence g1 = sentence({"Heap", "overflow", "in", "Acme", "Viewer", ".", "Fixed", "later"},
                                     {"O", "O", "O", "B-vendor", "B-product", "B-vendor", "O", "O"}, "gt");
  TaggedSentence p1 = g1;
  p1.labels[5] = BioLabel::outside();
  // ".." kept as one gold token although the tokenizer splits it.
  const std::string raw2 = "read files via .. sequences";
  const TaggedSentence g2 = sentence({"read", "files", "via", "..", "sequences"},
                                     {"O", "O", "O", "O", "O"}, "tok");
  TaggedSentence p2 = g2;
  p2.labels[3] = BioLabel::begin(Entity::kVersion);
  // Plain model error on consistent tokens.
  const std::string raw3 = "Acme Viewer crash";
  const TaggedSentence g3 = sentence({"Acme", "Viewer", "crash"}, {"B-vendor", "B-product", "O"}, "model");
  TaggedSentence p3 = g3;
  p3.labels[1] = BioLabel::begin(Entity::kVendor);

  const Corpus gold = {g1, g2, g3};
  const Corpus pred = {p1, p2, p3};
  const std::vector<std::string> raw = {raw1, raw2, raw3};
  const std::vector<std::vector<BioLabel>> evidence = {
      labels({"O", "O", "O", "B-vendor", "B-product", "O", "O", "O"}), {}, g3.labels};
  const auto cases = error_analysis(gold, pred, raw, evidence);
  ASSERT_EQ(cases.size(), 3u);
  EXPECT_EQ(cases[0].sentence_id, "gt");
  EXPECT_EQ(cases[0].position, 5u);
  EXPECT_EQ(cases[0].category, ErrorCategory::kGroundTruthSuspect);
  EXPECT_EQ(cases[1].sentence_id, "tok");
  EXPECT_EQ(cases[1].category, ErrorCategory::kTokenizationMismatch);
  EXPECT_EQ(cases[2].category, ErrorCategory::kModelError);
  for (const auto& c : cases) EXPECT_FALSE(c.gold_label == c.pred_label);
}

TEST(Compare, SingleReport) {
  EvalReport r;
  r.accuracy = 0.5;
  const ComparisonTable t = compare_models({{"only", r}});
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.best.at("accuracy"), std::set<std::string>{"only"});
  EXPECT_THROW(compare_models({}), InvalidArgument);
}

TEST(Compare, ThreeModels) {
  auto make = [](double acc, double p, double r, double f) {
    EvalReport e;
    e.accuracy = acc;
    e.micro = {p, r, f, false, false};
    return e;
  };
  const std::map<std::string, EvalReport> reports = {
      {"alpha", make(0.9913, 0.9483, 0.9614, 0.9548)},
      {"beta", make(0.9913, 0.9471, 0.9615, 0.9543)},
      {"gamma", make(0.9828, 0.8916, 0.9069, 0.8992)}};
  const ComparisonTable t = compare_models(reports);
  EXPECT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.best.at("precision"), std::set<std::string>{"alpha"});
  EXPECT_EQ(t.best.at("f1"), std::set<std::string>{"alpha"});
  EXPECT_EQ(t.best.at("recall"), std::set<std::string>{"beta"});
  EXPECT_EQ(t.best.at("accuracy"), (std::set<std::string>{"alpha", "beta"}));
  // Column winners against a direct max.
  for (const char* col : {"accuracy", "precision", "recall", "f1"}) {
    double best = -1;
    for (const auto& row : t.rows) {
      const double v = std::string(col) == "accuracy"    ? row.accuracy
                       : std::string(col) == "precision" ? row.precision
                       : std::string(col) == "recall"    ? row.recall
                                                         : row.f1;
      best = std::max(best, v);
    }
    for (const auto& row : t.rows) {
      const double v = std::string(col) == "accuracy"    ? row.accuracy
                       : std::string(col) == "precision" ? row.precision
                       : std::string(col) == "recall"    ? row.recall
                                                         : row.f1;
      EXPECT_EQ(t.best.at(col).count(row.name) == 1, v == best) << col << " " << row.name;
    }
  }
  const auto j = comparison_to_json(t);
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_NE(render_comparison(t).find("*"), std::string::npos);
}

}  // namespace
}  // namespace cpeid
