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

// Independent recounts used to check the evaluation module.

#ifndef CPEID_TESTS_SUPPORT_ORACLES_HPP_
#define CPEID_TESTS_SUPPORT_ORACLES_HPP_

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "cpeid/corpus.hpp"
#include "cpeid/tagger.hpp"

namespace cpeid::testing {

struct Cell {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct OracleMetrics {
  std::array<Cell, 5> per_class{};
  Cell pooled;
  std::size_t span_tp = 0, span_fp = 0, span_fn = 0;
  double accuracy = 0.0;
  double micro_precision = 0.0, micro_recall = 0.0, micro_f1 = 0.0;
  double macro_f1 = 0.0;
  std::array<double, 5> class_precision{}, class_recall{}, class_f1{};
  std::array<bool, 5> class_present{};
};

// Direct loop over every (gold, pred) label pair, padding skipped.
OracleMetrics brute_force_metrics(const Corpus& gold, const Corpus& pred);

// First line in text that differs, for readable test output.
// Exhaustive argmax over all kLabelCount^n label paths, enumerated in
// lexicographic order; the first strict maximum wins. Paths breaking BIO are
// skipped regardless of the transition scores.
std::vector<std::size_t> brute_force_best_path(const std::vector<LabelScores>& emissions,
                                               const TransitionScores& scores);

std::string first_difference(const std::string& a, const std::string& b);

}  // namespace cpeid::testing

#endif  // CPEID_TESTS_SUPPORT_ORACLES_HPP_
