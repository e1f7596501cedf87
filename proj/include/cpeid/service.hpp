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

#ifndef CPEID_SERVICE_HPP_
#define CPEID_SERVICE_HPP_

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpeid/corpus.hpp"
#include "cpeid/tagger.hpp"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace cpeid {

struct NamedTagger {
  std::string name;
  std::shared_ptr<const Tagger> tagger;
};

// Immutable set of loaded taggers plus the optional registered corpus.
struct Registry {
  std::vector<NamedTagger> taggers;
  std::optional<CorpusStats> corpus_stats;
};

struct ServiceConfig {
  std::size_t max_text_len = 10000;
  bool allow_reload = false;
};

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

// {"results": [{model_name, kind, spans[, timing_ms]}]} for the selected
// taggers. selection is a tagger name, a kind, or "all". Returns nullopt
// when nothing matches. Propagates TransportError.
std::optional<nlohmann::json> annotate_results(std::string_view text,
                                               std::span<const NamedTagger> taggers,
                                               std::string_view selection,
                                               bool with_timing);

class Service {
 public:
  explicit Service(ServiceConfig config = {});

  // Atomically replaces the registry; in-flight requests keep the old one.
  void set_registry(std::shared_ptr<const Registry> registry);
  std::shared_ptr<const Registry> registry() const;
  // Reported by /health until the first registry is installed.
  bool ready() const { return ready_.load(); }

  // Used by POST /reload when allow_reload is set.
  void set_reloader(std::function<std::shared_ptr<const Registry>()> reloader);

  HttpReply annotate(std::string_view body) const;
  HttpReply models() const;
  HttpReply corpus_stats() const;
  HttpReply health() const;
  HttpReply reload();

  // Registers every route on server.
  void mount(httplib::Server& server);

 private:
  ServiceConfig config_;
  mutable std::mutex mu_;
  std::shared_ptr<const Registry> registry_;
  std::atomic<bool> ready_{false};
  std::function<std::shared_ptr<const Registry>()> reloader_;
};

}  // namespace cpeid

#endif  // CPEID_SERVICE_HPP_
