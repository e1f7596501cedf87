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

#ifndef CPEID_CPE_HPP_
#define CPEID_CPE_HPP_

#include <string>
#include <string_view>

namespace cpeid {

// A CPE 2.3 name. Field values are stored unescaped; "*" is ANY and "-" is
// NA. The four extended attributes (sw_edition, target_sw, target_hw, other)
// are kept verbatim, still escaped, in extended_suffix.
struct CpeName {
  static constexpr std::string_view kWildcard = "*";

  std::string cpe_version = "2.3";
  std::string part = "*";
  std::string vendor = "*";
  std::string product = "*";
  std::string version = "*";
  std::string update = "*";
  std::string edition = "*";
  std::string language = "*";
  std::string extended_suffix = "*:*:*:*";

  bool operator==(const CpeName&) const = default;
};

inline bool is_wildcard(std::string_view value) {
  return value.empty() || value == "*" || value == "-";
}

// Parses a "cpe:2.3:" formatted string. Throws CpeError.
CpeName parse_cpe_uri(std::string_view uri);

// Inverse of parse_cpe_uri.
std::string format_cpe_uri(const CpeName& name);

// Escapes one attribute value for the formatted-string binding.
std::string escape_cpe_value(std::string_view value);

}  // namespace cpeid

#endif  // CPEID_CPE_HPP_
