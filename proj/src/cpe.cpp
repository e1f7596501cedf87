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
#include "cpeid/cpe.hpp"

#include <cctype>
#include <string>
#include <vector>

#include "cpeid/error.hpp"

namespace cpeid {
namespace {

constexpr std::string_view kPrefix23 = "cpe:2.3:";
constexpr std::size_t kComponentCount = 11;

// Splits on colons not preceded by an escaping backslash. Components keep
// their escapes.
std::vector<std::string> split_unescaped(std::string_view body) {
  std::vector<std::string> parts(1);
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (c == '\\' && i + 1 < body.size()) {
      parts.back() += c;
      parts.back() += body[++i];
    } else if (c == ':') {
      parts.emplace_back();
    } else {
      parts.back() += c;
    }
  }
  return parts;
}

std::string unescape(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (value[i] == '\\' && i + 1 < value.size()) ++i;
    out += value[i];
  }
  return out;
}

bool needs_escape(unsigned char c) {
  if (c >= 0x80 || std::isalnum(c)) return false;
  switch (c) {
    case '_':
    case '-':
    case '.':
    case '*':
    case '?':
      return false;
    default:
      return true;
  }
}

}  // namespace

std::string escape_cpe_value(std::string_view value) {
  if (value == "*" || value == "-") return std::string(value);
  std::string out;
  out.reserve(value.size());
  for (const char c : value) {
    if (needs_escape(static_cast<unsigned char>(c))) out += '\\';
    out += c;
  }
  return out;
}

CpeName parse_cpe_uri(std::string_view uri) {
  if (!uri.starts_with(kPrefix23)) {
    throw CpeError(CpeError::Kind::kUnsupportedVersion,
                   "unsupported CPE binding (expected \"cpe:2.3:\"): " +
                       std::string(uri));
  }
  const auto parts = split_unescaped(uri.substr(kPrefix23.size()));
  if (parts.size() != kComponentCount) {
    throw CpeError(CpeError::Kind::kMalformed,
                   "malformed CPE 2.3 name: expected 11 components after "
                   "the prefix, found " +
                       std::to_string(parts.size()));
  }
  CpeName name;
  name.part = unescape(parts[0]);
  if (name.part != "a" && name.part != "h" && name.part != "o" &&
      name.part != "*" && name.part != "-") {
    throw CpeError(CpeError::Kind::kMalformed,
                   "malformed CPE 2.3 name: part must be a, h, o or a "
                   "wildcard, found \"" + name.part + "\"");
  }
  name.vendor = unescape(parts[1]);
  name.product = unescape(parts[2]);
  name.version = unescape(parts[3]);
  name.update = unescape(parts[4]);
  name.edition = unescape(parts[5]);
  name.language = unescape(parts[6]);
  name.extended_suffix =
      parts[7] + ":" + parts[8] + ":" + parts[9] + ":" + parts[10];
  return name;
}

std::string format_cpe_uri(const CpeName& name) {
  std::string out = "cpe:";
  out += name.cpe_version;
  for (const std::string* field :
       {&name.part, &name.vendor, &name.product, &name.version, &name.update,
        &name.edition, &name.language}) {
    out += ':';
    out += escape_cpe_value(*field);
  }
  out += ':';
  out += name.extended_suffix;
  return out;
}

}  // namespace cpeid
