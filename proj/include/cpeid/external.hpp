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

#ifndef CPEID_EXTERNAL_HPP_
#define CPEID_EXTERNAL_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpeid/augmentor.hpp"
#include "cpeid/tagger.hpp"

namespace cpeid {

struct HttpEndpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // starts with '/'
  std::string url() const { return base + path; }
};

// Splits "http://host:port/path"; throws InvalidArgument otherwise.
HttpEndpoint parse_endpoint(std::string_view url);

// POSTs {"tokens": [...]} and expects {"labels": [...]} drawn from the
// 11-label vocabulary. Failures raise TransportError naming the endpoint.
class ExternalTagger : public Tagger {
 public:
  explicit ExternalTagger(std::string url, double timeout_seconds = 10.0);
  std::string_view kind() const override { return "external"; }
  std::vector<BioLabel> label(std::span<const Token> tokens) const override;
  nlohmann::json meta() const override;

 private:
  HttpEndpoint endpoint_;
  double timeout_seconds_;
};

// POSTs {"tokens": [...], "mask_positions": [...]} and expects
// {"replacements": [...]}, e.g. a masked-language-model fill service.
class HttpSynonymProvider : public SynonymProvider {
 public:
  explicit HttpSynonymProvider(std::string url, double timeout_seconds = 30.0);
  std::vector<std::string> fill(
      std::span<const std::string> tokens,
      std::span<const std::size_t> mask_positions) const override;

 private:
  HttpEndpoint endpoint_;
  double timeout_seconds_;
};

}  // namespace cpeid

#endif  // CPEID_EXTERNAL_HPP_
