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

#include "cpeid/external.hpp"

#include <chrono>

#include "cpeid/error.hpp"
#include "httplib.h"

namespace cpeid {
namespace {

using nlohmann::json;

json post_json(const HttpEndpoint& endpoint, double timeout_seconds, const json& body) {
  httplib::Client client(endpoint.base);
  const auto timeout = std::chrono::duration<double>(timeout_seconds);
  client.set_connection_timeout(
      std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  auto res = client.Post(endpoint.path, body.dump(), "application/json");
  if (!res) {
    throw TransportError(endpoint.url(), "request failed (" +
                                             httplib::to_string(res.error()) + ")");
  }
  if (res->status != 200) {
    throw TransportError(endpoint.url(), "HTTP status " + std::to_string(res->status));
  }
  try {
    return json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw TransportError(endpoint.url(), std::string("invalid JSON reply: ") + e.what());
  }
}

}  // namespace

HttpEndpoint parse_endpoint(std::string_view url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string_view::npos ||
      (url.substr(0, scheme) != "http" && url.substr(0, scheme) != "https")) {
    throw InvalidArgument("endpoint must be an http(s) URL: " + std::string(url));
  }
  const std::size_t slash = url.find('/', scheme + 3);
  HttpEndpoint ep;
  ep.base = std::string(url.substr(0, slash));
  ep.path = slash == std::string_view::npos ? "/" : std::string(url.substr(slash));
  if (ep.base.size() <= scheme + 3) {
    throw InvalidArgument("endpoint has no host: " + std::string(url));
  }
  return ep;
}

ExternalTagger::ExternalTagger(std::string url, double timeout_seconds)
    : endpoint_(parse_endpoint(url)), timeout_seconds_(timeout_seconds) {}

std::vector<BioLabel> ExternalTagger::label(std::span<const Token> tokens) const {
  json tokens_json = json::array();
  for (const Token& t : tokens) tokens_json.push_back(t.text);
  const json reply = post_json(endpoint_, timeout_seconds_, {{"tokens", tokens_json}});
  if (!reply.is_object() || !reply.contains("labels") || !reply["labels"].is_array()) {
    throw TransportError(endpoint_.url(), "reply has no \"labels\" array");
  }
  const json& labels = reply["labels"];
  if (labels.size() != tokens.size()) {
    throw TransportError(endpoint_.url(), "reply has " + std::to_string(labels.size()) +
                                              " labels for " +
                                              std::to_string(tokens.size()) + " tokens");
  }
  std::vector<BioLabel> out;
  out.reserve(labels.size());
  for (const json& l : labels) {
    const auto parsed = l.is_string() ? parse_label(l.get<std::string>()) : std::nullopt;
    if (!parsed) {
      throw TransportError(endpoint_.url(), "label outside the vocabulary: " + l.dump());
    }
    out.push_back(*parsed);
  }
  return out;
}

json ExternalTagger::meta() const { return {{"endpoint", endpoint_.url()}}; }

HttpSynonymProvider::HttpSynonymProvider(std::string url, double timeout_seconds)
    : endpoint_(parse_endpoint(url)), timeout_seconds_(timeout_seconds) {}

std::vector<std::string> HttpSynonymProvider::fill(
    std::span<const std::string> tokens,
    std::span<const std::size_t> mask_positions) const {
  const json body = {
      {"tokens", std::vector<std::string>(tokens.begin(), tokens.end())},
      {"mask_positions",
       std::vector<std::size_t>(mask_positions.begin(), mask_positions.end())}};
  const json reply = post_json(endpoint_, timeout_seconds_, body);
  if (!reply.is_object() || !reply.contains("replacements") ||
      !reply["replacements"].is_array()) {
    throw TransportError(endpoint_.url(), "reply has no \"replacements\" array");
  }
  std::vector<std::string> out;
  for (const json& r : reply["replacements"]) {
    if (!r.is_string()) {
      throw ProviderContractError("replacement is not a string: " + r.dump());
    }
    out.push_back(r.get<std::string>());
  }
  return out;
}

}  // namespace cpeid
