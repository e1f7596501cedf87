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

#include "cpeid/service.hpp"

#include <chrono>

#include "cpeid/error.hpp"
#include "cpeid/json_io.hpp"
#include "httplib.h"

namespace cpeid {
namespace {

using nlohmann::json;

HttpReply error_reply(int status, const std::string& message) {
  return {status, {{"error", message}}};
}

bool selected(const NamedTagger& t, std::string_view selection) {
  return selection == "all" || selection == t.name || selection == t.tagger->kind();
}

void send(httplib::Response& res, const HttpReply& reply) {
  res.status = reply.status;
  res.set_content(reply.body.dump(-1, ' ', false, json::error_handler_t::replace),
                  "application/json");
}

}  // namespace

std::optional<json> annotate_results(std::string_view text,
                                     std::span<const NamedTagger> taggers,
                                     std::string_view selection, bool with_timing) {
  json results = json::array();
  for (const NamedTagger& t : taggers) {
    if (!selected(t, selection)) continue;
    const auto start = std::chrono::steady_clock::now();
    const std::vector<TextSpan> spans = predict(text, *t.tagger);
    const auto elapsed = std::chrono::steady_clock::now() - start;
    json block = {{"model_name", t.name},
                  {"kind", t.tagger->kind()},
                  {"spans", spans_to_json(spans)}};
    if (with_timing) {
      block["timing_ms"] = std::chrono::duration<double, std::milli>(elapsed).count();
    }
    results.push_back(std::move(block));
  }
  if (results.empty()) return std::nullopt;
  return json{{"results", results}};
}

Service::Service(ServiceConfig config) : config_(config) {}

void Service::set_registry(std::shared_ptr<const Registry> registry) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    registry_ = std::move(registry);
  }
  ready_.store(true);
}

std::shared_ptr<const Registry> Service::registry() const {
  std::lock_guard<std::mutex> lock(mu_);
  return registry_;
}

void Service::set_reloader(std::function<std::shared_ptr<const Registry>()> reloader) {
  reloader_ = std::move(reloader);
}

HttpReply Service::annotate(std::string_view body) const {
  json request;
  try {
    request = json::parse(body);
  } catch (const json::parse_error&) {
    return error_reply(400, "request body is not valid JSON");
  }
  if (!request.is_object() || !request.contains("text") || !request["text"].is_string()) {
    return error_reply(400, "\"text\" must be a string");
  }
  const std::string text = request["text"].get<std::string>();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    return error_reply(400, "text is empty");
  }
  if (text.size() > config_.max_text_len) {
    return error_reply(413, "text exceeds " + std::to_string(config_.max_text_len) +
                                " characters");
  }
  std::string model = "all";
  if (request.contains("model")) {
    if (!request["model"].is_string()) return error_reply(400, "\"model\" must be a string");
    model = request["model"].get<std::string>();
  }
  const auto reg = registry();
  if (!reg || reg->taggers.empty()) return error_reply(503, "no taggers loaded");
  try {
    auto results = annotate_results(text, reg->taggers, model, true);
    if (!results) return error_reply(404, "unknown model \"" + model + "\"");
    return {200, std::move(*results)};
  } catch (const TransportError& e) {
    return {502, {{"error", e.what()}, {"endpoint", e.endpoint()}}};
  }
}

HttpReply Service::models() const {
  json out = json::array();
  if (const auto reg = registry()) {
    for (const NamedTagger& t : reg->taggers) {
      out.push_back({{"name", t.name},
                     {"kind", t.tagger->kind()},
                     {"training_meta", t.tagger->meta()}});
    }
  }
  return {200, out};
}

HttpReply Service::corpus_stats() const {
  const auto reg = registry();
  if (!reg || !reg->corpus_stats) return error_reply(404, "no corpus registered");
  return {200, stats_to_json(*reg->corpus_stats)};
}

HttpReply Service::health() const {
  return {200, {{"status", ready() ? "ok" : "loading"}}};
}

HttpReply Service::reload() {
  if (!config_.allow_reload || !reloader_) return error_reply(403, "reload is disabled");
  try {
    set_registry(reloader_());
  } catch (const Error& e) {
    return error_reply(500, std::string("reload failed: ") + e.what());
  }
  return {200, {{"status", "reloaded"}, {"models", registry()->taggers.size()}}};
}

void Service::mount(httplib::Server& server) {
  server.Post("/annotate", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, annotate(req.body));
  });
  server.Get("/models", [this](const httplib::Request&, httplib::Response& res) {
    send(res, models());
  });
  server.Get("/corpus/stats", [this](const httplib::Request&, httplib::Response& res) {
    send(res, corpus_stats());
  });
  server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    send(res, health());
  });
  server.Post("/reload", [this](const httplib::Request&, httplib::Response& res) {
    send(res, reload());
  });
}

}  // namespace cpeid
