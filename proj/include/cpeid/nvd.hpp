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
#ifndef CPEID_NVD_HPP_
#define CPEID_NVD_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cpeid {

// One CVE record from an NVD JSON 1.1 feed.
struct CveEntry {
  std::string cve_id;
  std::string summary;
  std::vector<std::string> cpe_uris;
  int published_year = 0;

  bool operator==(const CveEntry&) const = default;
};

struct SkippedItem {
  std::string cve_id;  // may be empty if the id itself was missing
  std::string reason;

  bool operator==(const SkippedItem&) const = default;
};

struct FeedParseResult {
  std::vector<CveEntry> entries;
  std::vector<SkippedItem> skipped;
};

bool is_valid_cve_id(std::string_view id);

// Collapses whitespace runs to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

// Decompresses gzip input; bytes without the gzip magic are returned as-is.
std::string maybe_gunzip(std::string_view bytes);

// Parses an nvdcve-1.1-YYYY.json document (optionally gzip-compressed).
// Throws ParseError carrying the byte offset on malformed JSON. Items
// without an English description or with a malformed id are skipped and
// listed in the result.
FeedParseResult parse_cve_feed(std::string_view raw_bytes, int year);

// Single list ordered by (published_year, cve_id); when an id repeats, the
// record with the later year wins.
std::vector<CveEntry> merge_feeds(
    std::span<const std::vector<CveEntry>> entries_by_year);

// Line-delimited JSON, fields {cve_id, summary, cpe_uris, published_year}.
std::string write_cve_jsonl(std::span<const CveEntry> entries);
std::vector<CveEntry> read_cve_jsonl(std::string_view text);

// Extracts YYYY from names like "nvdcve-1.1-2010.json.gz"; -1 if absent.
int feed_year_from_filename(std::string_view filename);

}  // namespace cpeid

#endif  // CPEID_NVD_HPP_
