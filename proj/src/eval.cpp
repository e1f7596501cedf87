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

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "cpeid/error.hpp"

namespace cpeid {
namespace {

using nlohmann::json;

Ratio safe_ratio(std::size_t num, std::size_t den) {
  if (den == 0) return {0.0, true};
  return {static_cast<double>(num) / static_cast<double>(den), false};
}

std::string sentence_name(const TaggedSentence& s, std::size_t index) {
  return s.source_id.empty() ? "#" + std::to_string(index) : s.source_id;
}

void check_alignment(std::span<const TaggedSentence> gold,
                     std::span<const TaggedSentence> pred) {
  if (gold.size() != pred.size()) {
    throw AlignmentError("gold has " + std::to_string(gold.size()) +
                         " sentences, prediction has " + std::to_string(pred.size()));
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].labels.size() != pred[i].labels.size() ||
        gold[i].tokens.size() != gold[i].labels.size()) {
      throw AlignmentError("sentence " + sentence_name(gold[i], i) + ": gold has " +
                           std::to_string(gold[i].labels.size()) +
                           " labels, prediction has " +
                           std::to_string(pred[i].labels.size()));
    }
  }
}

bool is_pad(const TaggedSentence& gold, const TaggedSentence& pred, std::size_t i) {
  return gold.tokens[i].padding ||
         (i < pred.tokens.size() && pred.tokens[i].padding);
}

using SpanKey = std::tuple<Entity, std::size_t, std::size_t>;

std::vector<SpanKey> span_keys(std::span<const BioLabel> labels) {
  std::vector<SpanKey> out;
  const std::vector<BioLabel> repaired = repair_bio(labels);
  for (std::size_t i = 0; i < repaired.size(); ++i) {
    if (repaired[i].prefix != Prefix::kB) continue;
    std::size_t end = i + 1;
    while (end < repaired.size() && repaired[end].prefix == Prefix::kI) ++end;
    out.emplace_back(repaired[i].entity, i, end);
  }
  return out;
}

void count_sentence(const TaggedSentence& gold, const TaggedSentence& pred,
                    TokenCounts& counts) {
  std::vector<BioLabel> gold_masked = gold.labels;
  std::vector<BioLabel> pred_masked = pred.labels;
  for (std::size_t i = 0; i < gold.labels.size(); ++i) {
    if (is_pad(gold, pred, i)) {
      gold_masked[i] = pred_masked[i] = BioLabel::outside();
      continue;
    }
    const BioLabel g = gold.labels[i];
    const BioLabel p = pred.labels[i];
    const bool correct = g == p;
    for (const Entity e : kAllEntities) {
      ConfusionCounts& c = counts.per_class[static_cast<std::size_t>(e)];
      const bool gold_is = !g.is_outside() && g.entity == e;
      const bool pred_is = !p.is_outside() && p.entity == e;
      if (gold_is) {
        (correct ? c.tp : c.fn) += 1;
      } else if (pred_is) {
        ++c.fp;
      } else {
        ++c.tn;
      }
    }
    ConfusionCounts& pooled = counts.pooled;
    if (!g.is_outside()) {
      (correct ? pooled.tp : pooled.fn) += 1;
    } else if (!p.is_outside()) {
      ++pooled.fp;
    } else {
      ++pooled.tn;
    }
  }
  const auto gold_spans = span_keys(gold_masked);
  const auto pred_spans = span_keys(pred_masked);
  std::size_t matched = 0;
  for (const SpanKey& k : pred_spans) {
    if (std::find(gold_spans.begin(), gold_spans.end(), k) != gold_spans.end()) ++matched;
  }
  counts.span_tp += matched;
  counts.span_fp += pred_spans.size() - matched;
  counts.span_fn += gold_spans.size() - matched;
}

PrfMetrics prf(std::size_t tp, std::size_t fp, std::size_t fn) {
  const Ratio p = safe_ratio(tp, tp + fp);
  const Ratio r = safe_ratio(tp, tp + fn);
  return {p.value, r.value, f1(p.value, r.value), p.undefined, r.undefined};
}

// Character range of each gold token inside raw, or npos when it cannot be
// located in order.
std::vector<std::pair<std::size_t, std::size_t>> locate_tokens(
    const std::string& raw, std::span<const Token> tokens) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t cursor = 0;
  for (const Token& t : tokens) {
    if (t.padding) {
      out.emplace_back(std::string::npos, std::string::npos);
      continue;
    }
    const std::size_t at = raw.find(t.text, cursor);
    if (at == std::string::npos) {
      out.emplace_back(std::string::npos, std::string::npos);
      continue;
    }
    out.emplace_back(at, at + t.text.size());
    cursor = at + t.text.size();
  }
  return out;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

}  // namespace

Ratio precision(const ConfusionCounts& c) { return safe_ratio(c.tp, c.tp + c.fp); }
Ratio recall(const ConfusionCounts& c) { return safe_ratio(c.tp, c.tp + c.fn); }
Ratio accuracy(const ConfusionCounts& c) { return safe_ratio(c.tp + c.tn, c.total()); }

double f1(double p, double r) {
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

TokenCounts& TokenCounts::operator+=(const TokenCounts& o) {
  for (std::size_t i = 0; i < kEntityCount; ++i) per_class[i] += o.per_class[i];
  pooled += o.pooled;
  span_tp += o.span_tp;
  span_fp += o.span_fp;
  span_fn += o.span_fn;
  return *this;
}

TokenCounts count_tokens_serial(std::span<const TaggedSentence> gold,
                                std::span<const TaggedSentence> pred) {
  check_alignment(gold, pred);
  TokenCounts counts;
  for (std::size_t i = 0; i < gold.size(); ++i) count_sentence(gold[i], pred[i], counts);
  return counts;
}

TokenCounts count_tokens(std::span<const TaggedSentence> gold,
                         std::span<const TaggedSentence> pred) {
  check_alignment(gold, pred);
  TokenCounts total;
  const auto n = static_cast<std::ptrdiff_t>(gold.size());
#pragma omp parallel
  {
    TokenCounts local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      count_sentence(gold[k], pred[k], local);
    }
#pragma omp critical(cpeid_count_tokens_merge)
    total += local;
  }
  return total;
}

EvalReport report_from_counts(const TokenCounts& counts) {
  EvalReport report;
  std::size_t sum_tp = 0, sum_fp = 0, sum_fn = 0;
  double f1_sum = 0.0;
  std::size_t f1_classes = 0;
  for (const Entity e : kAllEntities) {
    const ConfusionCounts& c = counts.per_class[static_cast<std::size_t>(e)];
    ClassMetrics m;
    const Ratio p = precision(c);
    const Ratio r = recall(c);
    m.precision = p.value;
    m.recall = r.value;
    m.f1 = f1(p.value, r.value);
    m.support = c.tp + c.fn;
    m.undefined = c.tp + c.fn + c.fp == 0;
    if (!m.undefined) {
      f1_sum += m.f1;
      ++f1_classes;
    }
    report.per_class[e] = m;
    sum_tp += c.tp;
    sum_fp += c.fp;
    sum_fn += c.fn;
  }
  report.macro_undefined = f1_classes == 0;
  report.macro_f1 = f1_classes == 0 ? 0.0 : f1_sum / static_cast<double>(f1_classes);
  report.micro = prf(sum_tp, sum_fp, sum_fn);
  report.pooled = counts.pooled;
  report.accuracy = accuracy(counts.pooled).value;
  report.evaluated_tokens = counts.pooled.total();
  report.span = prf(counts.span_tp, counts.span_fp, counts.span_fn);
  return report;
}

EvalReport classification_report(std::span<const TaggedSentence> gold,
                                 std::span<const TaggedSentence> pred) {
  return report_from_counts(count_tokens(gold, pred));
}

std::string_view category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kGroundTruthSuspect:
      return "ground_truth_suspect";
    case ErrorCategory::kTokenizationMismatch:
      return "tokenization_mismatch";
    case ErrorCategory::kModelError:
      return "model_error";
  }
  return "";
}

std::vector<ErrorCase> error_analysis(std::span<const TaggedSentence> gold,
                                      std::span<const TaggedSentence> pred,
                                      std::span<const std::string> raw_texts,
                                      std::span<const std::vector<BioLabel>> evidence) {
  check_alignment(gold, pred);
  if (!raw_texts.empty() && raw_texts.size() != gold.size()) {
    throw AlignmentError("error_analysis: raw_texts not parallel to the corpus");
  }
  if (!evidence.empty() && evidence.size() != gold.size()) {
    throw AlignmentError("error_analysis: evidence not parallel to the corpus");
  }
  std::vector<ErrorCase> out;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const TaggedSentence& g = gold[s];
    const TaggedSentence& p = pred[s];
    const std::string* raw =
        raw_texts.empty() || raw_texts[s].empty() ? nullptr : &raw_texts[s];
    const std::vector<BioLabel>* ev =
        evidence.empty() || evidence[s].size() != g.labels.size() ? nullptr
                                                                  : &evidence[s];
    std::vector<std::pair<std::size_t, std::size_t>> located;
    std::set<std::pair<std::size_t, std::size_t>> boundaries;
    if (raw != nullptr) {
      located = locate_tokens(*raw, g.tokens);
      for (const Token& t : tokenize(*raw)) boundaries.emplace(t.char_start, t.char_end);
    }
    for (std::size_t i = 0; i < g.labels.size(); ++i) {
      if (is_pad(g, p, i) || g.labels[i] == p.labels[i]) continue;
      ErrorCase ec{sentence_name(g, s), i, g.labels[i], p.labels[i],
                   ErrorCategory::kModelError};
      if (raw != nullptr && !boundaries.contains(located[i])) {
        ec.category = ErrorCategory::kTokenizationMismatch;
      } else if (ev != nullptr && (*ev)[i] == p.labels[i] && !((*ev)[i] == g.labels[i])) {
        ec.category = ErrorCategory::kGroundTruthSuspect;
      }
      out.push_back(std::move(ec));
    }
  }
  return out;
}

json report_to_json(const EvalReport& report, std::size_t max_errors) {
  json per_class = json::object();
  for (const auto& [entity, m] : report.per_class) {
    per_class[std::string(entity_name(entity))] = {{"precision", m.precision},
                                                   {"recall", m.recall},
                                                   {"f1", m.f1},
                                                   {"support", m.support},
                                                   {"undefined", m.undefined}};
  }
  auto prf_json = [](const PrfMetrics& m) {
    return json{{"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1},
                {"precision_undefined", m.precision_undefined},
                {"recall_undefined", m.recall_undefined}};
  };
  json errors = json::array();
  for (std::size_t k = 0; k < report.error_cases.size() && k < max_errors; ++k) {
    const ErrorCase& e = report.error_cases[k];
    errors.push_back({{"sentence_id", e.sentence_id},
                      {"position", e.position},
                      {"gold_label", label_name(e.gold_label)},
                      {"pred_label", label_name(e.pred_label)},
                      {"category", category_name(e.category)}});
  }
  std::map<std::string, std::size_t> by_category;
  for (const ErrorCase& e : report.error_cases) ++by_category[std::string(category_name(e.category))];
  return {{"per_class", per_class},
          {"macro_f1", report.macro_f1},
          {"macro_undefined", report.macro_undefined},
          {"micro", prf_json(report.micro)},
          {"accuracy", report.accuracy},
          {"token_counts",
           {{"tp", report.pooled.tp},
            {"fp", report.pooled.fp},
            {"fn", report.pooled.fn},
            {"tn", report.pooled.tn}}},
          {"entity_span", prf_json(report.span)},
          {"evaluated_tokens", report.evaluated_tokens},
          {"error_counts", by_category},
          {"errors", errors}};
}

std::string render_report(const EvalReport& report) {
  std::string out = "               precision    recall  f1-score   support\n\n";
  char line[160];
  for (const auto& [entity, m] : report.per_class) {
    std::snprintf(line, sizeof(line), "%12s %12.4f %9.4f %9.4f %9zu\n",
                  std::string(entity_name(entity)).c_str(), m.precision, m.recall,
                  m.f1, m.support);
    out += line;
  }
  std::size_t support = 0;
  for (const auto& [entity, m] : report.per_class) support += m.support;
  out += '\n';
  std::snprintf(line, sizeof(line), "%12s %12.4f %9.4f %9.4f %9zu\n", "micro avg",
                report.micro.precision, report.micro.recall, report.micro.f1, support);
  out += line;
  std::snprintf(line, sizeof(line), "%12s %12s %9s %9.4f %9zu\n", "macro avg", "", "",
                report.macro_f1, support);
  out += line;
  std::snprintf(line, sizeof(line), "%12s %12s %9s %9.4f %9zu\n", "accuracy", "", "",
                report.accuracy, report.evaluated_tokens);
  out += line;
  std::snprintf(line, sizeof(line), "%12s %12.4f %9.4f %9.4f\n", "entity span",
                report.span.precision, report.span.recall, report.span.f1);
  out += line;
  return out;
}

ComparisonTable compare_models(const std::map<std::string, EvalReport>& reports) {
  if (reports.empty()) throw InvalidArgument("compare_models: no reports");
  ComparisonTable table;
  for (const auto& [name, r] : reports) {
    table.rows.push_back({name, r.accuracy, r.micro.precision, r.micro.recall, r.micro.f1});
  }
  const std::pair<const char*, double ComparisonRow::*> kColumns[] = {
      {"accuracy", &ComparisonRow::accuracy},
      {"precision", &ComparisonRow::precision},
      {"recall", &ComparisonRow::recall},
      {"f1", &ComparisonRow::f1}};
  for (const auto& [column, member] : kColumns) {
    double best = table.rows.front().*member;
    for (const ComparisonRow& row : table.rows) best = std::max(best, row.*member);
    for (const ComparisonRow& row : table.rows) {
      if (row.*member == best) table.best[column].insert(row.name);
    }
  }
  return table;
}

json comparison_to_json(const ComparisonTable& table) {
  json rows = json::array();
  for (const ComparisonRow& r : table.rows) {
    rows.push_back({{"model", r.name},
                    {"accuracy", r.accuracy},
                    {"precision", r.precision},
                    {"recall", r.recall},
                    {"f1", r.f1}});
  }
  json best = json::object();
  for (const auto& [column, names] : table.best) best[column] = names;
  return {{"rows", rows}, {"best", best}};
}

std::string render_comparison(const ComparisonTable& table) {
  std::size_t width = 5;
  for (const ComparisonRow& r : table.rows) width = std::max(width, r.name.size());
  auto cell = [&](const ComparisonRow& r, const char* column, double v) {
    const bool best = table.best.at(column).contains(r.name);
    return fmt("%10.4f", v) + (best ? "*" : " ");
  };
  std::string out = std::string(width, ' ');
  out += "   accuracy  precision     recall         f1\n";
  for (const ComparisonRow& r : table.rows) {
    out += r.name + std::string(width - r.name.size(), ' ');
    out += cell(r, "accuracy", r.accuracy);
    out += cell(r, "precision", r.precision);
    out += cell(r, "recall", r.recall);
    out += cell(r, "f1", r.f1);
    out += '\n';
  }
  out += "(* best in column)\n";
  return out;
}

}  // namespace cpeid
