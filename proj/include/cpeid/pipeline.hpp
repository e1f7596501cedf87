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

#ifndef CPEID_PIPELINE_HPP_
#define CPEID_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpeid/augmentor.hpp"
#include "cpeid/corpus.hpp"
#include "cpeid/service.hpp"
#include "cpeid/tagger.hpp"
#include "json.hpp"

namespace cpeid {

struct PipelineConfig {
  std::filesystem::path feeds_dir = "feeds";
  std::filesystem::path corpus_dir = "corpus";
  std::filesystem::path model_dir = "models";

  std::size_t max_len = kDefaultMaxLen;
  double test_fraction = 0.18;
  std::uint64_t seed = 42;

  AugmentConfig augment;
  // When set, overrides augment.multiplier with ceil(target / selected).
  std::optional<std::size_t> augment_target_count;
  std::filesystem::path synonyms_path;  // empty: built-in dictionary
  std::string synonyms_url;             // fill-mask service, optional

  TrainConfig train;
};

// Artifact file names, relative to corpus_dir / model_dir.
namespace artifacts {
inline constexpr std::string_view kCves = "cves.jsonl";
inline constexpr std::string_view kIngestReport = "ingest_report.json";
inline constexpr std::string_view kAnnotated = "annotated.conll";
inline constexpr std::string_view kAnnotationReport = "annotation_report.json";
inline constexpr std::string_view kAugmented = "augmented.conll";
inline constexpr std::string_view kAugmentReport = "augment_report.json";
inline constexpr std::string_view kMerged = "merged.conll";
inline constexpr std::string_view kCorpusStats = "corpus_stats.json";
inline constexpr std::string_view kTrain = "train.conll";
inline constexpr std::string_view kTest = "test.conll";
inline constexpr std::string_view kModel = "model.json";
inline constexpr std::string_view kEvalReport = "eval_report.json";
inline constexpr std::string_view kEvalText = "eval_report.txt";
}  // namespace artifacts

PipelineConfig config_from_json(const nlohmann::json& doc,
                                const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const PipelineConfig& config);
// Relative paths inside the file resolve against the file's directory.
PipelineConfig load_config(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Each stage returns the JSON summary printed by the CLI and throws
// PrerequisiteError naming the producing command when an input is missing.
nlohmann::json run_ingest(const PipelineConfig& config);
nlohmann::json run_annotate(const PipelineConfig& config);
nlohmann::json run_augment(const PipelineConfig& config);
nlohmann::json run_merge(const PipelineConfig& config);
// Pads/trims the merged corpus (or input, remapped with the default label
// policy when given) and writes the seeded train/test split.
nlohmann::json run_build_corpus(const PipelineConfig& config,
                                const std::filesystem::path& input = {});
nlohmann::json run_train(const PipelineConfig& config);
nlohmann::json run_eval(const PipelineConfig& config, std::size_t max_errors = 1000);
// Random sample of annotated sentences for manual spot checks.
nlohmann::json run_sample(const PipelineConfig& config, std::size_t count);

struct TaggerSources {
  std::vector<std::filesystem::path> model_paths;
  std::filesystem::path cpe_dictionary;  // one CPE URI per line
  std::string external_url;
};

// Learned taggers (named after the file stem), a gazetteer tagger when a
// dictionary or the ingested CVEs are available, and an external tagger
// when a URL is given. Names are unique.
std::vector<NamedTagger> load_taggers(const PipelineConfig& config,
                                      const TaggerSources& sources);

// Same result blocks as POST /annotate, without timing.
nlohmann::json run_predict(const PipelineConfig& config, const TaggerSources& sources,
                           std::string_view text, std::string_view model);

// Registry for the service: taggers plus stats of corpus_path (or the
// merged corpus when present).
std::shared_ptr<const Registry> build_registry(const PipelineConfig& config,
                                               const TaggerSources& sources,
                                               const std::filesystem::path& corpus_path = {});

// Reads the CPE dictionary file format (comments with '#', blank lines ok).
std::vector<std::string> read_cpe_dictionary(std::string_view text);

}  // namespace cpeid

#endif  // CPEID_PIPELINE_HPP_
