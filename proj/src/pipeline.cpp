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

#include "cpeid/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cpeid/annotator.hpp"
#include "cpeid/error.hpp"
#include "cpeid/eval.hpp"
#include "cpeid/external.hpp"
#include "cpeid/json_io.hpp"
#include "cpeid/nvd.hpp"

namespace cpeid {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

fs::path corpus_file(const PipelineConfig& c, std::string_view name) {
  return c.corpus_dir / name;
}

fs::path model_file(const PipelineConfig& c, std::string_view name) {
  return c.model_dir / name;
}

std::string require(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path)) {
    throw PrerequisiteError("missing " + path.string() + "; run `cpeid " + producer +
                                "` first",
                            producer);
  }
  return read_file(path);
}

std::string dump(const json& j) {
  return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::set<Entity> entities_from_json(const json& arr) {
  std::set<Entity> out;
  for (const json& e : arr) {
    const auto entity = entity_from_name(e.get<std::string>());
    if (!entity) throw InvalidArgument("unknown entity in config: " + e.dump());
    out.insert(*entity);
  }
  return out;
}

Split prepared_split(const PipelineConfig& config) {
  Corpus merged =
      read_conll(require(corpus_file(config, artifacts::kMerged), "merge"));
  for (TaggedSentence& s : merged) s = pad_or_trim(s, config.max_len);
  return split_train_test(merged, config.test_fraction, config.seed);
}

std::unique_ptr<SynonymProvider> make_provider(const PipelineConfig& config) {
  if (!config.synonyms_url.empty()) {
    return std::make_unique<HttpSynonymProvider>(config.synonyms_url);
  }
  if (!config.synonyms_path.empty()) {
    return std::make_unique<DictionarySynonymProvider>(
        DictionarySynonymProvider::from_json(read_file(config.synonyms_path)));
  }
  return std::make_unique<DictionarySynonymProvider>(DictionarySynonymProvider::builtin());
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to " + path.string());
}

PipelineConfig config_from_json(const json& doc, const fs::path& base_dir) {
  PipelineConfig c;
  try {
    if (doc.contains("paths")) {
      const json& p = doc["paths"];
      if (p.contains("feeds_dir")) c.feeds_dir = resolve(base_dir, p["feeds_dir"].get<std::string>());
      if (p.contains("corpus_dir")) c.corpus_dir = resolve(base_dir, p["corpus_dir"].get<std::string>());
      if (p.contains("model_dir")) c.model_dir = resolve(base_dir, p["model_dir"].get<std::string>());
    } else {
      c.feeds_dir = resolve(base_dir, c.feeds_dir);
      c.corpus_dir = resolve(base_dir, c.corpus_dir);
      c.model_dir = resolve(base_dir, c.model_dir);
    }
    if (doc.contains("corpus")) {
      const json& p = doc["corpus"];
      c.max_len = p.value("max_len", c.max_len);
      c.test_fraction = p.value("test_fraction", c.test_fraction);
      c.seed = p.value("seed", c.seed);
    }
    if (doc.contains("augment")) {
      const json& p = doc["augment"];
      c.augment.mask_count = p.value("mask_count", c.augment.mask_count);
      c.augment.multiplier = p.value("multiplier", c.augment.multiplier);
      c.augment.seed = p.value("seed", c.augment.seed);
      if (p.contains("target_entities")) {
        c.augment.target_entities = entities_from_json(p["target_entities"]);
      }
      if (p.contains("target_count") && !p["target_count"].is_null()) {
        c.augment_target_count = p["target_count"].get<std::size_t>();
      }
      if (p.contains("synonyms_path") && !p["synonyms_path"].get<std::string>().empty()) {
        c.synonyms_path = resolve(base_dir, p["synonyms_path"].get<std::string>());
      }
      c.synonyms_url = p.value("synonyms_url", c.synonyms_url);
    }
    if (doc.contains("train")) {
      const json& p = doc["train"];
      c.train.epochs = p.value("epochs", c.train.epochs);
      c.train.seed = p.value("seed", c.train.seed);
      c.train.shuffle = p.value("shuffle", c.train.shuffle);
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  if (c.max_len < 1) throw InvalidArgument("config: corpus.max_len must be >= 1");
  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) {
    throw InvalidArgument("config: corpus.test_fraction must be in (0, 1)");
  }
  if (c.train.epochs < 1) throw InvalidArgument("config: train.epochs must be >= 1");
  validate(c.augment);
  return c;
}

json config_to_json(const PipelineConfig& c) {
  json targets = json::array();
  for (const Entity e : c.augment.target_entities) targets.push_back(entity_name(e));
  return {
      {"paths",
       {{"feeds_dir", c.feeds_dir.string()},
        {"corpus_dir", c.corpus_dir.string()},
        {"model_dir", c.model_dir.string()}}},
      {"corpus", {{"max_len", c.max_len}, {"test_fraction", c.test_fraction}, {"seed", c.seed}}},
      {"augment",
       {{"mask_count", c.augment.mask_count},
        {"multiplier", c.augment.multiplier},
        {"seed", c.augment.seed},
        {"target_entities", targets},
        {"target_count", c.augment_target_count ? json(*c.augment_target_count) : json()},
        {"synonyms_path", c.synonyms_path.string()},
        {"synonyms_url", c.synonyms_url}}},
      {"train", {{"epochs", c.train.epochs}, {"seed", c.train.seed}, {"shuffle", c.train.shuffle}}}};
}

PipelineConfig load_config(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError("config " + path.string() + ": " + e.what(), e.byte);
  }
  return config_from_json(doc, path.parent_path());
}

json run_ingest(const PipelineConfig& config) {
  if (!fs::is_directory(config.feeds_dir)) {
    throw PrerequisiteError("feeds directory " + config.feeds_dir.string() +
                                " does not exist; download NVD JSON 1.1 feeds into it",
                            "ingest");
  }
  std::vector<fs::path> feeds;
  for (const auto& entry : fs::directory_iterator(config.feeds_dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() &&
        (name.ends_with(".json") || name.ends_with(".json.gz"))) {
      feeds.push_back(entry.path());
    }
  }
  std::sort(feeds.begin(), feeds.end());
  std::vector<int> years;
  for (const fs::path& f : feeds) {
    const int year = feed_year_from_filename(f.filename().string());
    if (year < 0) throw InvalidArgument("cannot infer the feed year from " + f.string());
    years.push_back(year);
  }

  std::vector<FeedParseResult> parsed(feeds.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(feeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      parsed[k] = parse_cve_feed(read_file(feeds[k]), years[k]);
    } catch (...) {
#pragma omp critical(cpeid_ingest_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::vector<CveEntry>> by_year;
  json skipped = json::array();
  json per_feed = json::array();
  for (std::size_t k = 0; k < feeds.size(); ++k) {
    for (const SkippedItem& s : parsed[k].skipped) {
      skipped.push_back({{"feed", feeds[k].filename().string()},
                         {"cve_id", s.cve_id},
                         {"reason", s.reason}});
    }
    per_feed.push_back({{"feed", feeds[k].filename().string()},
                        {"year", years[k]},
                        {"entries", parsed[k].entries.size()},
                        {"skipped", parsed[k].skipped.size()}});
    by_year.push_back(std::move(parsed[k].entries));
  }
  const std::vector<CveEntry> merged = merge_feeds(by_year);
  write_file(corpus_file(config, artifacts::kCves), write_cve_jsonl(merged));
  const json report = {{"feeds", per_feed}, {"skipped", skipped}};
  write_file(corpus_file(config, artifacts::kIngestReport), dump(report));
  return {{"command", "ingest"},
          {"feeds", feeds.size()},
          {"entries", merged.size()},
          {"skipped", skipped.size()},
          {"output", corpus_file(config, artifacts::kCves).string()}};
}

json run_annotate(const PipelineConfig& config) {
  const std::vector<CveEntry> entries =
      read_cve_jsonl(require(corpus_file(config, artifacts::kCves), "ingest"));
  const AnnotationResult result = annotate_corpus(entries);
  write_file(corpus_file(config, artifacts::kAnnotated), write_conll(result.corpus));
  const json report = annotation_report_to_json(result.report);
  write_file(corpus_file(config, artifacts::kAnnotationReport), dump(report));
  return {{"command", "annotate"},
          {"report", report},
          {"output", corpus_file(config, artifacts::kAnnotated).string()}};
}

json run_augment(const PipelineConfig& config) {
  const Corpus annotated =
      read_conll(require(corpus_file(config, artifacts::kAnnotated), "annotate"));
  const Corpus selected = select_target_sentences(annotated, config.augment.target_entities);
  AugmentConfig augment = config.augment;
  if (config.augment_target_count) {
    augment.multiplier = multiplier_for_target(selected.size(), *config.augment_target_count);
  }
  const auto provider = make_provider(config);
  const AugmentResult result = augment_corpus(selected, augment, *provider);
  write_file(corpus_file(config, artifacts::kAugmented), write_conll(result.sentences));
  const json report = {{"selected", selected.size()},
                       {"multiplier", augment.multiplier},
                       {"mask_count", augment.mask_count},
                       {"generated", result.sentences.size()},
                       {"no_ops", result.no_ops}};
  write_file(corpus_file(config, artifacts::kAugmentReport), dump(report));
  return {{"command", "augment"},
          {"report", report},
          {"output", corpus_file(config, artifacts::kAugmented).string()}};
}

json run_merge(const PipelineConfig& config) {
  const Corpus annotated =
      read_conll(require(corpus_file(config, artifacts::kAnnotated), "annotate"));
  const Corpus augmented =
      read_conll(require(corpus_file(config, artifacts::kAugmented), "augment"));
  const Corpus merged = merge_corpora(annotated, augmented);
  write_file(corpus_file(config, artifacts::kMerged), write_conll(merged));
  const json stats = stats_to_json(compute_stats(merged, config.max_len));
  write_file(corpus_file(config, artifacts::kCorpusStats), dump(stats));
  return {{"command", "merge"},
          {"annotated", annotated.size()},
          {"augmented", augmented.size()},
          {"stats", stats},
          {"output", corpus_file(config, artifacts::kMerged).string()}};
}

json run_build_corpus(const PipelineConfig& config, const fs::path& input) {
  Corpus corpus;
  if (!input.empty()) {
    const LabelPolicy policy = default_label_policy();
    for (const RawSentence& raw : read_conll_raw(read_file(input))) {
      corpus.push_back(remap_labels(raw, policy));
    }
    write_file(corpus_file(config, artifacts::kMerged), write_conll(corpus));
  } else {
    corpus = read_conll(require(corpus_file(config, artifacts::kMerged), "merge"));
  }
  const CorpusStats stats = compute_stats(corpus, config.max_len);
  const Split split = prepared_split(config);
  write_file(corpus_file(config, artifacts::kTrain), write_conll(split.train));
  write_file(corpus_file(config, artifacts::kTest), write_conll(split.test));
  write_file(corpus_file(config, artifacts::kCorpusStats), dump(stats_to_json(stats)));
  return {{"command", "build-corpus"},
          {"stats", stats_to_json(stats)},
          {"train", split.train.size()},
          {"test", split.test.size()},
          {"max_len", config.max_len}};
}

json run_train(const PipelineConfig& config) {
  const Split split = prepared_split(config);
  const TaggerModel model = train(split.train, config.train);
  write_file(model_file(config, artifacts::kModel), save_model(model));
  return {{"command", "train"},
          {"sentences", split.train.size()},
          {"epochs", config.train.epochs},
          {"features", model.feature_count()},
          {"epoch_mistakes", model.meta().epoch_mistakes},
          {"output", model_file(config, artifacts::kModel).string()}};
}

json run_eval(const PipelineConfig& config, std::size_t max_errors) {
  const auto model = std::make_shared<const TaggerModel>(
      load_model(require(model_file(config, artifacts::kModel), "train")));
  const Split split = prepared_split(config);
  const LearnedTagger tagger(model);
  const Corpus predicted = tag_corpus(split.test, tagger);

  // Raw summaries and CPE evidence for sentences that came from a CVE.
  std::map<std::string, CveEntry> cves;
  if (fs::exists(corpus_file(config, artifacts::kCves))) {
    for (CveEntry& e : read_cve_jsonl(read_file(corpus_file(config, artifacts::kCves)))) {
      cves.emplace(e.cve_id, std::move(e));
    }
  }
  std::vector<std::string> raw_texts(split.test.size());
  std::vector<std::vector<BioLabel>> evidence(split.test.size());
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    auto it = cves.find(split.test[i].source_id);
    if (it == cves.end()) continue;
    raw_texts[i] = it->second.summary;
    std::size_t unused = 0;
    const Gazetteer gaz = gazetteer_from_uris(it->second.cpe_uris, &unused);
    evidence[i] = annotate_sentence(split.test[i].tokens, gaz).labels;
  }

  EvalReport report = classification_report(split.test, predicted);
  report.error_cases = error_analysis(split.test, predicted, raw_texts, evidence);
  const json report_json = report_to_json(report, max_errors);
  write_file(model_file(config, artifacts::kEvalReport), dump(report_json));
  write_file(model_file(config, artifacts::kEvalText), render_report(report));
  return {{"command", "eval"},
          {"test_sentences", split.test.size()},
          {"accuracy", report.accuracy},
          {"micro_f1", report.micro.f1},
          {"macro_f1", report.macro_f1},
          {"entity_span_f1", report.span.f1},
          {"errors", report.error_cases.size()},
          {"output", model_file(config, artifacts::kEvalReport).string()}};
}

json run_sample(const PipelineConfig& config, std::size_t count) {
  const Corpus annotated =
      read_conll(require(corpus_file(config, artifacts::kAnnotated), "annotate"));
  std::vector<std::size_t> order(annotated.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(config.seed);
  const std::size_t k = std::min(count, order.size());
  for (std::size_t j = 0; j < k; ++j) {
    std::swap(order[j], order[j + rng() % (order.size() - j)]);
  }
  json samples = json::array();
  for (std::size_t j = 0; j < k; ++j) {
    const TaggedSentence& s = annotated[order[j]];
    json spans = json::array();
    for (const EntitySpan& span : bio_to_spans(s.labels, s.tokens)) {
      spans.push_back({{"entity", entity_name(span.entity)}, {"text", span.text}});
    }
    samples.push_back({{"source_id", s.source_id},
                       {"text", join_tokens(s.tokens, 0, s.tokens.size())},
                       {"spans", spans}});
  }
  return {{"command", "sample"}, {"population", annotated.size()}, {"samples", samples}};
}

std::vector<std::string> read_cpe_dictionary(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

std::vector<NamedTagger> load_taggers(const PipelineConfig& config,
                                      const TaggerSources& sources) {
  std::vector<NamedTagger> out;
  std::set<std::string> names;
  auto unique_name = [&](std::string base) {
    std::string name = base;
    for (int k = 2; names.contains(name); ++k) name = base + "-" + std::to_string(k);
    names.insert(name);
    return name;
  };
  for (const fs::path& p : sources.model_paths) {
    auto model = std::make_shared<const TaggerModel>(load_model(read_file(p)));
    out.push_back({unique_name(p.stem().string()), std::make_shared<LearnedTagger>(model)});
  }
  std::vector<std::string> uris;
  if (!sources.cpe_dictionary.empty()) {
    uris = read_cpe_dictionary(read_file(sources.cpe_dictionary));
  } else if (fs::exists(corpus_file(config, artifacts::kCves))) {
    for (const CveEntry& e : read_cve_jsonl(read_file(corpus_file(config, artifacts::kCves)))) {
      uris.insert(uris.end(), e.cpe_uris.begin(), e.cpe_uris.end());
    }
  }
  if (!uris.empty()) {
    out.push_back({unique_name("gazetteer"),
                   std::make_shared<GazetteerTagger>(gazetteer_from_uris(uris))});
  }
  if (!sources.external_url.empty()) {
    out.push_back({unique_name("external"),
                   std::make_shared<ExternalTagger>(sources.external_url)});
  }
  return out;
}

json run_predict(const PipelineConfig& config, const TaggerSources& sources,
                 std::string_view text, std::string_view model) {
  TaggerSources resolved = sources;
  if (resolved.model_paths.empty() && fs::exists(model_file(config, artifacts::kModel)) &&
      (model == "all" || model == "learned" || model == "model")) {
    resolved.model_paths.push_back(model_file(config, artifacts::kModel));
  }
  const std::vector<NamedTagger> taggers = load_taggers(config, resolved);
  auto results = annotate_results(text, taggers, model, false);
  if (!results) {
    throw PrerequisiteError("no tagger matches \"" + std::string(model) +
                                "\"; train a model or pass --cpe-dict/--external-url",
                            model == "learned" ? "train" : "ingest");
  }
  return *results;
}

std::shared_ptr<const Registry> build_registry(const PipelineConfig& config,
                                               const TaggerSources& sources,
                                               const fs::path& corpus_path) {
  auto registry = std::make_shared<Registry>();
  registry->taggers = load_taggers(config, sources);
  fs::path stats_source = corpus_path;
  if (stats_source.empty() && fs::exists(corpus_file(config, artifacts::kMerged))) {
    stats_source = corpus_file(config, artifacts::kMerged);
  }
  if (!stats_source.empty()) {
    registry->corpus_stats = compute_stats(read_conll(read_file(stats_source)), config.max_len);
  }
  return registry;
}

}  // namespace cpeid
