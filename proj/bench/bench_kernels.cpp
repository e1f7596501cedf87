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

// Serial reference vs OpenMP kernels on generated CVE-like data.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "cpeid/annotator.hpp"
#include "cpeid/augmentor.hpp"
#include "cpeid/eval.hpp"
#include "cpeid/nvd.hpp"
#include "cpeid/tagger.hpp"

namespace {

using namespace cpeid;

const std::vector<std::string> kVendors = {"adobe", "microsoft", "cisco", "oracle", "apache",
                                           "mozilla", "google", "ibm", "redhat", "vmware"};
const std::vector<std::string> kProducts = {"flash_player", "windows", "ios", "mysql", "tomcat",
                                            "firefox", "chrome", "websphere", "enterprise_linux", "esxi"};
const std::vector<std::string> kUpdates = {"sp1", "update_2", "r3", "beta"};
const std::vector<std::string> kEditions = {"enterprise", "professional", "community"};

std::string spaced(std::string s) {
  for (char& c : s) {
    if (c == '_') c = ' ';
  }
  return s;
}

std::vector<CveEntry> make_entries(std::size_t n) {
  std::mt19937_64 rng(7);
  std::vector<CveEntry> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& v = kVendors[rng() % kVendors.size()];
    const std::string& p = kProducts[rng() % kProducts.size()];
    const std::string& u = kUpdates[rng() % kUpdates.size()];
    const std::string& e = kEditions[rng() % kEditions.size()];
    const std::string ver = std::to_string(1 + rng() % 12) + "." + std::to_string(rng() % 10);
    CveEntry entry;
    entry.cve_id = "CVE-2020-" + std::to_string(10000 + i);
    entry.published_year = 2020;
    entry.summary = "Buffer overflow in the parser of " + spaced(v) + " " + spaced(p) + " " + ver + " " +
                    spaced(u) + " " + e + " edition allows remote attackers to execute arbitrary code " +
                    "via a crafted file, a different vulnerability than CVE-2019-0001.";
    entry.cpe_uris = {"cpe:2.3:a:" + v + ":" + p + ":" + ver + ":" + u + ":" + e + ":*:*:*:*:*"};
    out.push_back(std::move(entry));
  }
  return out;
}

struct Data {
  std::vector<CveEntry> entries;
  Corpus corpus;
  std::vector<std::string> uris;
};

const Data& data() {
  static const Data d = [] {
    Data out;
    out.entries = make_entries(4000);
    out.corpus = annotate_corpus_serial(out.entries).corpus;
    for (const auto& e : out.entries) out.uris.insert(out.uris.end(), e.cpe_uris.begin(), e.cpe_uris.end());
    return out;
  }();
  return d;
}

template <bool kParallel>
void BM_Annotate(benchmark::State& state) {
  const auto& entries = data().entries;
  for (auto _ : state) {
    auto r = kParallel ? annotate_corpus(entries) : annotate_corpus_serial(entries);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(entries.size()));
}

template <bool kParallel>
void BM_Augment(benchmark::State& state) {
  const Corpus& corpus = data().corpus;
  const AugmentConfig config{7, {Entity::kEdition, Entity::kVendor, Entity::kUpdate}, 4, 42};
  const auto provider = DictionarySynonymProvider::builtin();
  for (auto _ : state) {
    auto r = kParallel ? augment_corpus(corpus, config, provider)
                       : augment_corpus_serial(corpus, config, provider);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.size() * config.multiplier));
}

template <bool kParallel>
void BM_CountTokens(benchmark::State& state) {
  const Corpus& gold = data().corpus;
  Corpus pred = gold;
  for (std::size_t i = 0; i < pred.size(); i += 3) pred[i].labels.assign(pred[i].size(), BioLabel::outside());
  for (auto _ : state) {
    auto c = kParallel ? count_tokens(gold, pred) : count_tokens_serial(gold, pred);
    benchmark::DoNotOptimize(c);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(gold.size()));
}

template <bool kParallel>
void BM_TagCorpus(benchmark::State& state) {
  const Corpus& corpus = data().corpus;
  const GazetteerTagger tagger(gazetteer_from_uris(data().uris));
  for (auto _ : state) {
    auto r = kParallel ? tag_corpus(corpus, tagger) : tag_corpus_serial(corpus, tagger);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.size()));
}

BENCHMARK(BM_Annotate<false>)->Name("annotate/serial")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Annotate<true>)->Name("annotate/parallel")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Augment<false>)->Name("augment/serial")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Augment<true>)->Name("augment/parallel")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CountTokens<false>)->Name("count_tokens/serial")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CountTokens<true>)->Name("count_tokens/parallel")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TagCorpus<false>)->Name("tag_corpus/serial")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TagCorpus<true>)->Name("tag_corpus/parallel")->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
