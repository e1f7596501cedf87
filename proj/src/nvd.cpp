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

#include "cpeid/nvd.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cctype>
#include <map>
#include <regex>
#include <tuple>
#include <unordered_set>

#include "cpeid/error.hpp"
#include "json.hpp"

namespace cpeid {
namespace {

using nlohmann::json;

void collect_cpes(const json& node, std::vector<std::string>& out,
                  std::unordered_set<std::string>& seen) {
  if (!node.is_object()) return;
  if (auto it = node.find("cpe_match"); it != node.end() && it->is_array()) {
    for (const json& match : *it) {
      auto uri = match.find("cpe23Uri");
      if (uri == match.end() || !uri->is_string()) continue;
      const auto& s = uri->get_ref<const std::string&>();
      if (seen.insert(s).second) out.push_back(s);
    }
  }
  if (auto it = node.find("children"); it != node.end() && it->is_array()) {
    for (const json& child : *it) collect_cpes(child, out, seen);
  }
}

const json* find_path(const json& root, std::initializer_list<const char*> path) {
  const json* cur = &root;
  for (const char* key : path) {
    if (!cur->is_object()) return nullptr;
    auto it = cur->find(key);
    if (it == cur->end()) return nullptr;
    cur = &*it;
  }
  return cur;
}

std::tuple<int, long long, long long> id_order_key(const CveEntry& e) {
  // CVE-YYYY-NNNN..: numeric order on both parts, so CVE-2010-9999 sorts
  // before CVE-2010-10000.
  long long id_year = 0;
  long long id_seq = 0;
  if (is_valid_cve_id(e.cve_id)) {
    const std::string_view id = e.cve_id;
    std::from_chars(id.data() + 4, id.data() + 8, id_year);
    std::from_chars(id.data() + 9, id.data() + id.size(), id_seq);
  }
  return {e.published_year, id_year, id_seq};
}

}  // namespace

bool is_valid_cve_id(std::string_view id) {
  static const std::regex kPattern(R"(CVE-\d{4}-\d{4,})");
  return std::regex_match(id.begin(), id.end(), kPattern);
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (const char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

std::string maybe_gunzip(std::string_view bytes) {
  if (bytes.size() < 2 || static_cast<unsigned char>(bytes[0]) != 0x1f ||
      static_cast<unsigned char>(bytes[1]) != 0x8b) {
    return std::string(bytes);
  }
  z_stream stream{};
  if (inflateInit2(&stream, 32 + MAX_WBITS) != Z_OK) {
    throw ParseError("gzip: cannot initialise decompressor", 0);
  }
  stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
  stream.avail_in = static_cast<uInt>(bytes.size());
  std::string out;
  char buffer[1 << 15];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    stream.next_out = reinterpret_cast<Bytef*>(buffer);
    stream.avail_out = sizeof(buffer);
    rc = inflate(&stream, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      const std::size_t at = stream.total_in;
      inflateEnd(&stream);
      throw ParseError("gzip: corrupt stream", at);
    }
    out.append(buffer, sizeof(buffer) - stream.avail_out);
    if (rc == Z_OK && stream.avail_in == 0 && stream.avail_out != 0) {
      inflateEnd(&stream);
      throw ParseError("gzip: truncated stream", stream.total_in);
    }
  }
  inflateEnd(&stream);
  return out;
}

FeedParseResult parse_cve_feed(std::string_view raw_bytes, int year) {
  const std::string text = maybe_gunzip(raw_bytes);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed NVD feed: ") + e.what(), e.byte);
  }
  FeedParseResult result;
  const json* items = find_path(doc, {"CVE_Items"});
  if (items == nullptr) return result;
  if (!items->is_array()) throw ParseError("CVE_Items is not an array", 0);

  for (const json& item : *items) {
    const json* id = find_path(item, {"cve", "CVE_data_meta", "ID"});
    std::string cve_id = id && id->is_string() ? id->get<std::string>() : "";
    if (!is_valid_cve_id(cve_id)) {
      result.skipped.push_back({cve_id, "missing or malformed CVE id"});
      continue;
    }
    std::string summary;
    if (const json* data = find_path(item, {"cve", "description", "description_data"});
        data && data->is_array()) {
      for (const json& d : *data) {
        if (d.value("lang", "") == "en" && d.contains("value") &&
            d["value"].is_string()) {
          summary = normalize_whitespace(d["value"].get<std::string>());
          if (!summary.empty()) break;
        }
      }
    }
    if (summary.empty()) {
      result.skipped.push_back({cve_id, "no English description"});
      continue;
    }
    CveEntry entry{std::move(cve_id), std::move(summary), {}, year};
    if (const json* nodes = find_path(item, {"configurations", "nodes"});
        nodes && nodes->is_array()) {
      std::unordered_set<std::string> seen;
      for (const json& node : *nodes) collect_cpes(node, entry.cpe_uris, seen);
    }
    result.entries.push_back(std::move(entry));
  }
  return result;
}

std::vector<CveEntry> merge_feeds(
    std::span<const std::vector<CveEntry>> entries_by_year) {
  std::map<std::string, const CveEntry*> latest;
  for (const auto& year_list : entries_by_year) {
    for (const CveEntry& e : year_list) {
      auto [it, inserted] = latest.emplace(e.cve_id, &e);
      if (!inserted && e.published_year >= it->second->published_year) {
        it->second = &e;
      }
    }
  }
  std::vector<CveEntry> out;
  out.reserve(latest.size());
  for (const auto& [id, e] : latest) out.push_back(*e);
  std::stable_sort(out.begin(), out.end(),
                   [](const CveEntry& a, const CveEntry& b) {
                     return id_order_key(a) < id_order_key(b);
                   });
  return out;
}

std::string write_cve_jsonl(std::span<const CveEntry> entries) {
  std::string out;
  for (const CveEntry& e : entries) {
    nlohmann::ordered_json line;
    line["cve_id"] = e.cve_id;
    line["summary"] = e.summary;
    line["cpe_uris"] = e.cpe_uris;
    line["published_year"] = e.published_year;
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::vector<CveEntry> read_cve_jsonl(std::string_view text) {
  std::vector<CveEntry> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const json j = json::parse(line);
      CveEntry e;
      e.cve_id = j.at("cve_id").get<std::string>();
      e.summary = j.at("summary").get<std::string>();
      e.cpe_uris = j.at("cpe_uris").get<std::vector<std::string>>();
      e.published_year = j.at("published_year").get<int>();
      out.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what(),
                       line_no, true);
    }
  }
  return out;
}

int feed_year_from_filename(std::string_view filename) {
  static const std::regex kYear(R"((?:^|[^0-9])((?:19|20)\d{2})(?:[^0-9]|$))");
  std::match_results<std::string_view::const_iterator> m;
  int year = -1;
  auto begin = filename.begin();
  while (std::regex_search(begin, filename.end(), m, kYear)) {
    year = std::stoi(m[1].str());
    begin = m[1].second;
  }
  return year;
}

}  // namespace cpeid
