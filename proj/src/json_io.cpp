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

#include "cpeid/json_io.hpp"

namespace cpeid {

using nlohmann::json;

json entity_counts_to_json(const std::map<Entity, std::size_t>& counts) {
  json out = json::object();
  for (const auto& [entity, n] : counts) out[std::string(entity_name(entity))] = n;
  return out;
}

json stats_to_json(const CorpusStats& stats) {
  return {{"sentence_count", stats.sentence_count},
          {"length_min", stats.length_min},
          {"length_max", stats.length_max},
          {"fraction_below_max_len", stats.fraction_below_max_len},
          {"tokens_per_entity", entity_counts_to_json(stats.tokens_per_entity)}};
}

json annotation_report_to_json(const AnnotationReport& report) {
  return {{"sentences_in", report.sentences_in},
          {"sentences_out", report.sentences_out},
          {"tokens_labeled_per_entity",
           entity_counts_to_json(report.tokens_labeled_per_entity)},
          {"unmatched_cpe_fields", report.unmatched_cpe_fields},
          {"unparsable_cpe_uris", report.unparsable_cpe_uris},
          {"skipped_ids", report.skipped_ids}};
}

json spans_to_json(std::span<const TextSpan> spans) {
  json out = json::array();
  for (const TextSpan& s : spans) {
    out.push_back({{"entity", entity_name(s.entity)},
                   {"char_start", s.char_start},
                   {"char_end", s.char_end},
                   {"text", s.text}});
  }
  return out;
}

}  // namespace cpeid
