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

#include "cpeid/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "cpeid/error.hpp"

namespace cpeid {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

bool is_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u);
}

void push_token(std::vector<Token>& out, std::string_view text,
                std::size_t start, std::size_t end) {
  out.push_back({std::string(text.substr(start, end - start)), start, end});
}

// Tokenizes one whitespace-free chunk text[start, end).
void tokenize_chunk(std::string_view text, std::size_t start, std::size_t end,
                    std::vector<Token>& out) {
  while (start < end && is_punct(text[start])) {
    push_token(out, text, start, start + 1);
    ++start;
  }
  std::size_t core_end = end;
  while (core_end > start && is_punct(text[core_end - 1])) --core_end;

  std::size_t word_start = start;
  for (std::size_t i = start; i < core_end; ++i) {
    const char c = text[i];
    if (!is_punct(c) || c == '-' || c == '_') continue;
    if (c == '.' && i > start && i + 1 < core_end &&
        is_word_char(text[i - 1]) && is_word_char(text[i + 1])) {
      continue;
    }
    if (word_start < i) push_token(out, text, word_start, i);
    push_token(out, text, i, i + 1);
    word_start = i + 1;
  }
  if (word_start < core_end) push_token(out, text, word_start, core_end);

  for (std::size_t i = core_end; i < end; ++i) push_token(out, text, i, i + 1);
}

std::string label_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

std::size_t TaggedSentence::content_size() const {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(),
                    [](const Token& t) { return !t.padding; }));
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (i < j) tokenize_chunk(text, i, j, out);
    i = j;
  }
  return out;
}

std::string join_tokens(std::span<const Token> tokens, std::size_t start,
                        std::size_t end) {
  std::string out;
  for (std::size_t i = start; i < end; ++i) {
    if (i > start) out += ' ';
    out += tokens[i].text;
  }
  return out;
}

std::vector<BioLabel> spans_to_bio(std::span<const Token> tokens,
                                   std::span<const EntitySpan> spans) {
  std::vector<std::size_t> order(spans.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t k : order) {
    const EntitySpan& s = spans[k];
    if (s.token_start >= s.token_end || s.token_end > tokens.size()) {
      throw InvalidArgument("span " + std::to_string(k) + " [" +
                            std::to_string(s.token_start) + ", " +
                            std::to_string(s.token_end) +
                            ") is empty or outside the sentence");
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spans[a].token_start < spans[b].token_start;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const EntitySpan& prev = spans[order[k - 1]];
    const EntitySpan& cur = spans[order[k]];
    if (cur.token_start < prev.token_end) {
      throw OverlapError(
          "overlapping spans " + std::to_string(order[k - 1]) + " [" +
          std::to_string(prev.token_start) + ", " +
          std::to_string(prev.token_end) + ") and " + std::to_string(order[k]) +
          " [" + std::to_string(cur.token_start) + ", " +
          std::to_string(cur.token_end) + ")");
    }
  }
  std::vector<BioLabel> labels(tokens.size());
  for (const EntitySpan& s : spans) {
    labels[s.token_start] = BioLabel::begin(s.entity);
    for (std::size_t i = s.token_start + 1; i < s.token_end; ++i) {
      labels[i] = BioLabel::inside(s.entity);
    }
  }
  return labels;
}

std::vector<EntitySpan> bio_to_spans(std::span<const BioLabel> labels,
                                     std::span<const Token> tokens) {
  if (labels.size() != tokens.size()) {
    throw AlignmentError("bio_to_spans: " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(tokens.size()) +
                         " tokens");
  }
  if (!is_bio_valid(labels)) {
    throw BioError("bio_to_spans: invalid BIO sequence (repair it first)");
  }
  std::vector<EntitySpan> spans;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].prefix != Prefix::kB) continue;
    std::size_t end = i + 1;
    while (end < labels.size() && labels[end].prefix == Prefix::kI) ++end;
    spans.push_back({labels[i].entity, i, end, join_tokens(tokens, i, end)});
  }
  return spans;
}

LabelPolicy default_label_policy() {
  LabelPolicy policy;
  for (const Entity e : kAllEntities) policy.keep.emplace(entity_name(e));
  policy.renames = {{"application", "product"},
                    {"hardware", "product"},
                    {"os", "product"}};
  return policy;
}

TaggedSentence remap_labels(const RawSentence& sentence,
                            const LabelPolicy& policy) {
  TaggedSentence out{sentence.tokens, {}, sentence.source_id};
  out.labels.reserve(sentence.labels.size());
  for (const std::string& raw : sentence.labels) {
    BioLabel label;
    if (raw.size() > 2 && raw[1] == '-' && (raw[0] == 'B' || raw[0] == 'I')) {
      std::string name = raw.substr(2);
      bool kept = policy.keep.contains(name);
      if (auto it = policy.renames.find(name); it != policy.renames.end()) {
        name = it->second;
        kept = true;
      }
      const auto entity = entity_from_name(name);
      if (kept && entity) {
        label = raw[0] == 'B' ? BioLabel::begin(*entity)
                              : BioLabel::inside(*entity);
      }
    }
    out.labels.push_back(label);
  }
  out.labels = repair_bio(out.labels);
  return out;
}

TaggedSentence pad_or_trim(const TaggedSentence& sentence, std::size_t max_len) {
  if (max_len == 0) throw InvalidArgument("pad_or_trim: max_len must be >= 1");
  TaggedSentence out = sentence;
  if (out.tokens.size() > max_len) {
    out.tokens.resize(max_len);
    out.labels.resize(max_len);
    return out;
  }
  std::size_t anchor = 0;
  for (const Token& t : out.tokens) {
    if (!t.padding) anchor = t.char_end;
  }
  while (out.tokens.size() < max_len) {
    out.tokens.push_back({std::string(kPadToken), anchor, anchor, true});
    out.labels.push_back(BioLabel::outside());
  }
  return out;
}

TaggedSentence strip_padding(const TaggedSentence& sentence) {
  TaggedSentence out{{}, {}, sentence.source_id};
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (sentence.tokens[i].padding) continue;
    out.tokens.push_back(sentence.tokens[i]);
    out.labels.push_back(sentence.labels[i]);
  }
  return out;
}

std::map<Entity, std::size_t> count_entity_tokens(
    std::span<const TaggedSentence> corpus) {
  std::map<Entity, std::size_t> counts;
  for (const Entity e : kAllEntities) counts[e] = 0;
  for (const TaggedSentence& s : corpus) {
    for (const BioLabel& l : s.labels) {
      if (!l.is_outside()) ++counts[l.entity];
    }
  }
  return counts;
}

CorpusStats compute_stats(std::span<const TaggedSentence> corpus,
                          std::size_t max_len) {
  CorpusStats stats;
  stats.sentence_count = corpus.size();
  stats.tokens_per_entity = count_entity_tokens(corpus);
  if (corpus.empty()) return stats;
  std::size_t below = 0;
  stats.length_min = corpus.front().content_size();
  for (const TaggedSentence& s : corpus) {
    const std::size_t len = s.content_size();
    stats.length_min = std::min(stats.length_min, len);
    stats.length_max = std::max(stats.length_max, len);
    if (len < max_len) ++below;
  }
  stats.fraction_below_max_len =
      static_cast<double>(below) / static_cast<double>(corpus.size());
  return stats;
}

std::string write_conll(std::span<const TaggedSentence> corpus) {
  std::string out;
  for (const TaggedSentence& s : corpus) {
    out += "# source_id = ";
    out += s.source_id;
    out += '\n';
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      out += s.tokens[i].text;
      out += '\t';
      out += label_name(s.labels[i]);
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::vector<Token> tokens_from_texts(std::span<const std::string> texts) {
  std::vector<Token> tokens;
  tokens.reserve(texts.size());
  std::size_t cursor = 0;
  std::size_t content_end = 0;
  for (const std::string& text : texts) {
    if (text == kPadToken) {
      tokens.push_back({text, content_end, content_end, true});
      continue;
    }
    if (cursor > 0) ++cursor;
    tokens.push_back({text, cursor, cursor + text.size(), false});
    cursor += text.size();
    content_end = cursor;
  }
  return tokens;
}

namespace {

// Shared line scanner for both CoNLL readers. on_sentence receives the token
// texts, raw label strings with their line numbers, and the source id.
template <typename OnSentence>
void scan_conll(std::string_view bytes, OnSentence&& on_sentence) {
  std::vector<std::string> texts;
  std::vector<std::string> labels;
  std::vector<std::size_t> lines;
  std::string source_id;
  bool open = false;
  auto flush = [&] {
    if (open) on_sentence(texts, labels, lines, source_id);
    texts.clear();
    labels.clear();
    lines.clear();
    source_id.clear();
    open = false;
  };
  constexpr std::string_view kIdComment = "# source_id = ";
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      flush();
      continue;
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      if (line.starts_with(kIdComment)) {
        if (!texts.empty()) flush();
        source_id = std::string(line.substr(kIdComment.size()));
        open = true;
        continue;
      }
      if (line.front() == '#') continue;
      throw ParseError(label_error(line_no, "expected token<TAB>label"),
                       line_no, true);
    }
    const std::string_view token = line.substr(0, tab);
    std::string_view label = line.substr(tab + 1);
    if (const std::size_t extra = label.find('\t');
        extra != std::string_view::npos) {
      label = label.substr(0, extra);
    }
    if (token.empty()) {
      throw ParseError(label_error(line_no, "empty token"), line_no, true);
    }
    texts.emplace_back(token);
    labels.emplace_back(label);
    lines.push_back(line_no);
    open = true;
  }
  flush();
}

}  // namespace

Corpus read_conll(std::string_view bytes, ConllMode mode) {
  Corpus corpus;
  scan_conll(bytes, [&](const std::vector<std::string>& texts,
                        const std::vector<std::string>& raw,
                        const std::vector<std::size_t>& lines,
                        const std::string& source_id) {
    TaggedSentence s;
    s.source_id = source_id;
    s.tokens = tokens_from_texts(texts);
    s.labels.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const auto label = parse_label(raw[i]);
      if (!label) {
        throw ParseError(label_error(lines[i], "not a BIO label: \"" + raw[i] + "\""),
                         lines[i], true);
      }
      const std::optional<BioLabel> prev =
          s.labels.empty() ? std::nullopt
                           : std::optional<BioLabel>(s.labels.back());
      if (!transition_allowed(prev, *label)) {
        if (mode == ConllMode::kStrict) {
          throw ParseError(
              label_error(lines[i], "\"" + raw[i] +
                                        "\" does not continue an entity of "
                                        "the same type"),
              lines[i], true);
        }
        s.labels.push_back(BioLabel::begin(label->entity));
        continue;
      }
      s.labels.push_back(*label);
    }
    corpus.push_back(std::move(s));
  });
  return corpus;
}

std::vector<RawSentence> read_conll_raw(std::string_view bytes) {
  std::vector<RawSentence> out;
  scan_conll(bytes, [&](const std::vector<std::string>& texts,
                        const std::vector<std::string>& raw,
                        const std::vector<std::size_t>&,
                        const std::string& source_id) {
    out.push_back({tokens_from_texts(texts), raw, source_id});
  });
  return out;
}

std::size_t test_split_size(std::size_t n, double test_fraction) {
  return static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(n)));
}

Split split_train_test(std::span<const TaggedSentence> corpus,
                       double test_fraction, std::uint64_t seed) {
  if (corpus.size() < 2) {
    throw InvalidArgument("split_train_test: need at least 2 sentences, got " +
                          std::to_string(corpus.size()));
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("split_train_test: test_fraction must be in (0, 1)");
  }
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng() % (i + 1)]);
  }
  const std::size_t test_size = test_split_size(corpus.size(), test_fraction);
  std::vector<bool> in_test(corpus.size(), false);
  for (std::size_t k = 0; k < test_size; ++k) in_test[order[k]] = true;
  Split split;
  split.test.reserve(test_size);
  split.train.reserve(corpus.size() - test_size);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (in_test[i] ? split.test : split.train).push_back(corpus[i]);
  }
  return split;
}

std::string fingerprint(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace cpeid
