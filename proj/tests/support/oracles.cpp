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

#include "oracles.hpp"

#include <set>
#include <sstream>
#include <tuple>

namespace cpeid::testing {
namespace {

double safe_div(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

// (entity, start, end) over content tokens; a span opens at B-x or at an I-x
// that does not continue an x span.
std::set<std::tuple<int, std::size_t, std::size_t>> spans_of(const TaggedSentence& s,
                                                             const std::vector<BioLabel>& labels) {
  std::set<std::tuple<int, std::size_t, std::size_t>> out;
  int open = -1;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= labels.size(); ++i) {
    int ent = -1;
    bool begins = false;
    if (i < labels.size() && !s.tokens[i].padding && labels[i].prefix != Prefix::kO) {
      ent = static_cast<int>(labels[i].entity);
      begins = labels[i].prefix == Prefix::kB || ent != open;
    }
    if (open >= 0 && (ent != open || begins)) {
      out.emplace(open, start, i);
      open = -1;
    }
    if (ent >= 0 && open < 0) {
      open = ent;
      start = i;
    }
  }
  return out;
}

}  // namespace

OracleMetrics brute_force_metrics(const Corpus& gold, const Corpus& pred) {
  OracleMetrics m;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto& g = gold[s];
    const auto& p = pred[s];
    for (std::size_t i = 0; i < g.labels.size(); ++i) {
      if (g.tokens[i].padding) continue;
      const BioLabel gl = g.labels[i];
      const BioLabel pl = p.labels[i];
      const bool same = gl.prefix == pl.prefix && (gl.prefix == Prefix::kO || gl.entity == pl.entity);
      for (int x = 0; x < 5; ++x) {
        const bool gx = gl.prefix != Prefix::kO && static_cast<int>(gl.entity) == x;
        const bool px = pl.prefix != Prefix::kO && static_cast<int>(pl.entity) == x;
        Cell& c = m.per_class[x];
        if (gx && same) ++c.tp;
        if (gx && !same) ++c.fn;
        if (!gx && px) ++c.fp;
        if (!gx && !px) ++c.tn;
      }
      const bool g_ent = gl.prefix != Prefix::kO;
      const bool p_ent = pl.prefix != Prefix::kO;
      if (g_ent && same) ++m.pooled.tp;
      if (g_ent && !same) ++m.pooled.fn;
      if (!g_ent && p_ent) ++m.pooled.fp;
      if (!g_ent && !p_ent) ++m.pooled.tn;
    }
    const auto gs = spans_of(g, g.labels);
    const auto ps = spans_of(g, p.labels);
    for (const auto& k : ps) (gs.count(k) ? m.span_tp : m.span_fp) += 1;
    for (const auto& k : gs) m.span_fn += ps.count(k) ? 0 : 1;
  }
  const Cell& pc = m.pooled;
  m.accuracy = safe_div(static_cast<double>(pc.tp + pc.tn),
                        static_cast<double>(pc.tp + pc.tn + pc.fp + pc.fn));
  std::size_t tp = 0, fp = 0, fn = 0, present = 0;
  double f1_sum = 0.0;
  for (int x = 0; x < 5; ++x) {
    const Cell& c = m.per_class[x];
    m.class_precision[x] = safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
    m.class_recall[x] = safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
    m.class_f1[x] = harmonic(m.class_precision[x], m.class_recall[x]);
    m.class_present[x] = c.tp + c.fn + c.fp > 0;
    if (m.class_present[x]) {
      f1_sum += m.class_f1[x];
      ++present;
    }
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
  }
  m.macro_f1 = present == 0 ? 0.0 : f1_sum / static_cast<double>(present);
  m.micro_precision = safe_div(static_cast<double>(tp), static_cast<double>(tp + fp));
  m.micro_recall = safe_div(static_cast<double>(tp), static_cast<double>(tp + fn));
  m.micro_f1 = harmonic(m.micro_precision, m.micro_recall);
  return m;
}

namespace {

bool inside_label(std::size_t idx) { return idx > 0 && (idx - 1) % 2 == 1; }
std::size_t label_entity(std::size_t idx) { return (idx - 1) / 2; }

struct PathSearch {
  const std::vector<LabelScores>& em;
  const TransitionScores& sc;
  std::vector<std::size_t> path;
  std::vector<std::size_t> best;
  double best_score = 0.0;

  void visit(std::size_t pos, double prefix) {
    if (pos == em.size()) {
      if (best.empty() || prefix > best_score) {
        best = path;
        best_score = prefix;
      }
      return;
    }
    for (std::size_t y = 0; y < kLabelCount; ++y) {
      if (inside_label(y)) {
        if (pos == 0) continue;
        const std::size_t prev = path[pos - 1];
        if (prev == 0 || label_entity(prev) != label_entity(y)) continue;
      }
      path[pos] = y;
      const double step = pos == 0 ? sc.start[y] : sc.transitions[path[pos - 1]][y];
      visit(pos + 1, prefix + em[pos][y] + step);
    }
  }
};

}  // namespace

std::vector<std::size_t> brute_force_best_path(const std::vector<LabelScores>& emissions,
                                               const TransitionScores& scores) {
  PathSearch search{emissions, scores, std::vector<std::size_t>(emissions.size()), {}, 0.0};
  search.visit(0, 0.0);
  return search.best;
}

std::string first_difference(const std::string& a, const std::string& b) {
  std::istringstream sa(a), sb(b);
  std::string la, lb;
  for (std::size_t line = 1;; ++line) {
    const bool ha = static_cast<bool>(std::getline(sa, la));
    const bool hb = static_cast<bool>(std::getline(sb, lb));
    if (!ha && !hb) return "";
    if (!ha || !hb || la != lb) {
      return "line " + std::to_string(line) + ": '" + (ha ? la : "<eof>") + "' vs '" +
             (hb ? lb : "<eof>") + "'";
    }
  }
}

}  // namespace cpeid::testing
