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

// cpeid: pipeline driver. Every command prints one JSON summary on stdout and
// exits 0; failures print {"error", "kind"[, "producer"]} and exit nonzero.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cpeid/error.hpp"
#include "cpeid/pipeline.hpp"
#include "cpeid/service.hpp"
#include "httplib.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitError = 1;
constexpr int kExitPrerequisite = 3;

httplib::Server* g_server = nullptr;

void handle_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<std::size_t> max_len;
  std::optional<double> test_fraction;
  std::optional<std::size_t> mask_count;
  std::optional<std::size_t> multiplier;
  std::optional<std::size_t> target_count;
};

cpeid::PipelineConfig resolve_config(const std::string& flag_path, const Overrides& o) {
  std::string path = flag_path;
  if (path.empty()) {
    if (const char* env = std::getenv("CPEID_CONFIG"); env != nullptr && *env != '\0') {
      path = env;
    } else if (fs::exists("cpeid.json")) {
      path = "cpeid.json";
    }
  }
  cpeid::PipelineConfig c = path.empty() ? cpeid::config_from_json(json::object())
                                         : cpeid::load_config(path);
  if (o.seed) c.seed = c.augment.seed = c.train.seed = *o.seed;
  if (o.epochs) c.train.epochs = *o.epochs;
  if (o.max_len) c.max_len = *o.max_len;
  if (o.test_fraction) c.test_fraction = *o.test_fraction;
  if (o.mask_count) c.augment.mask_count = *o.mask_count;
  if (o.multiplier) c.augment.multiplier = *o.multiplier;
  if (o.target_count) c.augment_target_count = *o.target_count;
  // Re-run the config checks on the overridden values.
  return cpeid::config_from_json(cpeid::config_to_json(c));
}

void print(const json& j) {
  std::cout << j.dump(2, ' ', false, json::error_handler_t::replace) << std::endl;
}

int fail(const std::string& kind, const std::string& message,
         const std::string& producer = "", int code = kExitError) {
  json err = {{"error", message}, {"kind", kind}};
  if (!producer.empty()) err["producer"] = producer;
  print(err);
  std::cerr << "cpeid: " << message << std::endl;
  return code;
}

int serve(const cpeid::PipelineConfig& config, const cpeid::TaggerSources& sources,
          const std::string& listen, const std::string& corpus, std::size_t max_text_len,
          bool allow_reload) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    return fail("invalid_argument", "--listen must be host:port");
  }
  const std::string host = listen.substr(0, colon);
  const int port = std::stoi(listen.substr(colon + 1));

  cpeid::Service service({max_text_len, allow_reload});
  service.set_reloader([=] { return cpeid::build_registry(config, sources, corpus); });
  httplib::Server server;
  service.mount(server);
  if (!server.bind_to_port(host, port)) {
    return fail("transport", "cannot bind " + listen);
  }
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  std::string load_error;
  std::thread loader([&] {
    try {
      service.set_registry(cpeid::build_registry(config, sources, corpus));
      print({{"command", "serve"},
             {"listen", listen},
             {"models", service.registry()->taggers.size()}});
    } catch (const std::exception& e) {
      load_error = e.what();
      server.stop();
    }
  });
  server.listen_after_bind();
  loader.join();
  g_server = nullptr;
  if (!load_error.empty()) return fail("load", load_error);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CPE entity identification pipeline for CVE summaries"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides o;
  app.add_option("--config", config_path, "Pipeline config file (env CPEID_CONFIG)");
  app.add_option("--seed", o.seed, "Seed for split, augmentation and training");
  app.add_option("--epochs", o.epochs, "Training epochs");
  app.add_option("--max-len", o.max_len, "Sentence length after padding/trimming");
  app.add_option("--test-fraction", o.test_fraction, "Held-out fraction");
  app.add_option("--mask-count", o.mask_count, "Tokens replaced per augmented sentence");
  app.add_option("--multiplier", o.multiplier, "Augmented sentences per selected sentence");
  app.add_option("--target-count", o.target_count,
                 "Derive the multiplier from a target number of augmented sentences");

  auto* ingest = app.add_subcommand("ingest", "Parse NVD JSON feeds into cves.jsonl");
  auto* annotate = app.add_subcommand("annotate", "Label CVE summaries from their CPEs");
  auto* augment = app.add_subcommand("augment", "Generate label-preserving sentences");
  auto* merge = app.add_subcommand("merge", "Merge annotated and augmented corpora");
  auto* build = app.add_subcommand("build-corpus", "Pad/trim and split the merged corpus");
  std::string build_input;
  build->add_option("--input", build_input,
                    "Foreign CoNLL corpus to remap onto the five CPE entities");
  auto* train_cmd = app.add_subcommand("train", "Train the sequence tagger");
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate the model on the held-out split");
  std::size_t max_errors = 1000;
  eval_cmd->add_option("--max-errors", max_errors, "Error cases written to the report");
  auto* sample = app.add_subcommand("sample", "Print random annotated sentences for review");
  std::size_t sample_count = 20;
  sample->add_option("--count", sample_count, "Number of sentences");
  auto* show_config = app.add_subcommand("config", "Print the effective configuration");

  cpeid::TaggerSources sources;
  std::vector<std::string> model_files;
  std::string cpe_dict;

  auto* predict = app.add_subcommand("predict", "Tag one text");
  std::string text;
  std::string model = "all";
  predict->add_option("--text", text, "CVE summary text")->required();
  predict->add_option("--model", model, "Tagger name, kind (learned|gazetteer|external) or all");
  predict->add_option("--model-file", model_files, "Learned model file(s)");
  predict->add_option("--cpe-dict", cpe_dict, "CPE dictionary for the gazetteer tagger");
  predict->add_option("--external-url", sources.external_url, "External tagger endpoint");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP annotation service");
  std::string listen = "127.0.0.1:8080";
  std::string corpus;
  std::size_t max_text_len = 10000;
  bool allow_reload = false;
  serve_cmd->add_option("--listen", listen, "host:port");
  serve_cmd->add_option("--model-file", model_files, "Learned model file(s)");
  serve_cmd->add_option("--cpe-dict", cpe_dict, "CPE dictionary for the gazetteer tagger");
  serve_cmd->add_option("--external-url", sources.external_url, "External tagger endpoint");
  serve_cmd->add_option("--corpus", corpus, "CoNLL corpus served by /corpus/stats");
  serve_cmd->add_option("--max-text-len", max_text_len, "Longest accepted text");
  serve_cmd->add_flag("--allow-reload", allow_reload, "Enable POST /reload");

  CLI11_PARSE(app, argc, argv);

  try {
    const cpeid::PipelineConfig config = resolve_config(config_path, o);
    for (const std::string& f : model_files) sources.model_paths.emplace_back(f);
    sources.cpe_dictionary = cpe_dict;

    if (*ingest) print(cpeid::run_ingest(config));
    else if (*annotate) print(cpeid::run_annotate(config));
    else if (*augment) print(cpeid::run_augment(config));
    else if (*merge) print(cpeid::run_merge(config));
    else if (*build) print(cpeid::run_build_corpus(config, build_input));
    else if (*train_cmd) print(cpeid::run_train(config));
    else if (*eval_cmd) print(cpeid::run_eval(config, max_errors));
    else if (*sample) print(cpeid::run_sample(config, sample_count));
    else if (*show_config) print(cpeid::config_to_json(config));
    else if (*predict) print(cpeid::run_predict(config, sources, text, model));
    else if (*serve_cmd) {
      return serve(config, sources, listen, corpus, max_text_len, allow_reload);
    }
  } catch (const cpeid::PrerequisiteError& e) {
    return fail("missing_prerequisite", e.what(), e.producer(), kExitPrerequisite);
  } catch (const cpeid::ParseError& e) {
    return fail("parse", e.what());
  } catch (const cpeid::TransportError& e) {
    return fail("transport", e.what());
  } catch (const cpeid::Error& e) {
    return fail("error", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
