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

#ifndef CPEID_EVAL_HPP_
#define CPEID_EVAL_HPP_

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cpeid/corpus.hpp"
#include "cpeid/labels.hpp"
#include "json.hpp"

namespace cpeid {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

// A metric value; undefined marks a 0/0 that was reported as 0.
struct Ratio {
  double value = 0.0;
  bool undefined = false;
};

Ratio precision(const ConfusionCounts& c);
Ratio recall(const ConfusionCounts& c);
Ratio accuracy(const ConfusionCounts& c);
double f1(double precision, double recall);

// Token-level tallies for one aligned corpus pair, padding excluded.
//  per class x (one-vs-rest): tp = gold entity x and pred == gold;
//    fn = gold entity x and pred != gold; fp = gold entity not x and pred
//    entity x; tn = the rest.
//  pooled: tp = gold entity and pred == gold; fn = gold entity and
//    pred != gold; fp = gold O and pred entity; tn = both O. Every
//    evaluated token lands in exactly one pooled cell.
// Span counts compare exact (entity, start, end) matches.
struct TokenCounts {
  std::array<ConfusionCounts, kEntityCount> per_class{};
  ConfusionCounts pooled;
  std::size_t span_tp = 0;
  std::size_t span_fp = 0;
  std::size_t span_fn = 0;

  TokenCounts& operator+=(const TokenCounts& o);
  bool operator==(const TokenCounts&) const = default;
};

// Throws AlignmentError naming the first misaligned sentence. Parallel over
// sentences; integer reductions make the result identical to the serial
// kernel.
TokenCounts count_tokens(std::span<const TaggedSentence> gold,
                         std::span<const TaggedSentence> pred);
TokenCounts count_tokens_serial(std::span<const TaggedSentence> gold,
                                std::span<const TaggedSentence> pred);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  bool undefined = false;  // no gold and no predicted tokens
};

struct PrfMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
};

enum class ErrorCategory { kGroundTruthSuspect, kTokenizationMismatch, kModelError };

std::string_view category_name(ErrorCategory category);

struct ErrorCase {
  std::string sentence_id;
  std::size_t position = 0;
  BioLabel gold_label;
  BioLabel pred_label;
  ErrorCategory category = ErrorCategory::kModelError;

  bool operator==(const ErrorCase&) const = default;
};

struct EvalReport {
  std::map<Entity, ClassMetrics> per_class;
  // Mean F1 over classes that occur in gold or prediction.
  double macro_f1 = 0.0;
  bool macro_undefined = false;
  // From per-class counts summed over classes.
  PrfMetrics micro;
  ConfusionCounts pooled;
  double accuracy = 0.0;
  // Entity-level exact match.
  PrfMetrics span;
  std::size_t evaluated_tokens = 0;
  std::vector<ErrorCase> error_cases;
};

EvalReport report_from_counts(const TokenCounts& counts);

EvalReport classification_report(std::span<const TaggedSentence> gold,
                                 std::span<const TaggedSentence> pred);

// Each mismatching non-padding position becomes one ErrorCase:
//  tokenization_mismatch when re-tokenizing raw_texts[s] does not produce
//    the gold token's character range;
//  ground_truth_suspect when evidence[s] agrees with the prediction but not
//    with gold;
//  model_error otherwise.
// raw_texts and evidence may be empty spans (no such information), else
// they must be parallel to gold; an empty string or label vector means "not
// available" for that sentence.
std::vector<ErrorCase> error_analysis(std::span<const TaggedSentence> gold,
                                      std::span<const TaggedSentence> pred,
                                      std::span<const std::string> raw_texts,
                                      std::span<const std::vector<BioLabel>> evidence = {});

nlohmann::json report_to_json(const EvalReport& report, std::size_t max_errors = 1000);
std::string render_report(const EvalReport& report);

struct ComparisonRow {
  std::string name;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  // column name -> models holding the column maximum (ties all marked)
  std::map<std::string, std::set<std::string>> best;
};

// Throws InvalidArgument on an empty map.
ComparisonTable compare_models(const std::map<std::string, EvalReport>& reports);
nlohmann::json comparison_to_json(const ComparisonTable& table);
std::string render_comparison(const ComparisonTable& table);

}  // namespace cpeid

#endif  // CPEID_EVAL_HPP_
