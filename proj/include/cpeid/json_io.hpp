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

#ifndef CPEID_JSON_IO_HPP_
#define CPEID_JSON_IO_HPP_

#include <span>
#include <string_view>

#include "cpeid/annotator.hpp"
#include "cpeid/corpus.hpp"
#include "cpeid/tagger.hpp"
#include "json.hpp"

namespace cpeid {

nlohmann::json stats_to_json(const CorpusStats& stats);
nlohmann::json annotation_report_to_json(const AnnotationReport& report);
nlohmann::json entity_counts_to_json(const std::map<Entity, std::size_t>& counts);
// {entity, char_start, char_end, text}
nlohmann::json spans_to_json(std::span<const TextSpan> spans);

}  // namespace cpeid

#endif  // CPEID_JSON_IO_HPP_
