// Copyright 2026 The vreward Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial vs OpenMP scoring kernels over a synthetic corpus.

#include <benchmark/benchmark.h>

#include <map>

#include "fixtures.h"
#include "vreward/batch.h"

namespace {

using namespace vreward;

struct Inputs {
  testing::LabeledCorpus corpus;
  std::vector<std::string> responses;

  explicit Inputs(std::size_t n) : corpus(testing::make_labeled_corpus(99, n)) {
    for (QARecord& r : corpus.records) {
      r.target_length = 4;
      auto it = corpus.predictions.find(r.id);
      responses.push_back(it == corpus.predictions.end() ? "" : it->second);
    }
  }
};

const Inputs& inputs(std::size_t n) {
  static std::map<std::size_t, Inputs> cache;
  return cache.try_emplace(n, n).first->second;
}

template <auto Kernel>
void BM_Responses(benchmark::State& state) {
  const Inputs& in = inputs(static_cast<std::size_t>(state.range(0)));
  const RewardConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Kernel(in.responses, in.corpus.records, config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_Records(benchmark::State& state) {
  const Inputs& in = inputs(static_cast<std::size_t>(state.range(0)));
  const RewardConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Kernel(in.corpus.records, in.corpus.predictions, config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_Responses<score_responses_serial>)->Name("score_responses/serial")
    ->Range(1 << 10, 1 << 16)->UseRealTime();
BENCHMARK(BM_Responses<score_responses>)->Name("score_responses/parallel")
    ->Range(1 << 10, 1 << 16)->UseRealTime();
BENCHMARK(BM_Records<score_records_serial>)->Name("score_records/serial")
    ->Range(1 << 10, 1 << 16)->UseRealTime();
BENCHMARK(BM_Records<score_records>)->Name("score_records/parallel")
    ->Range(1 << 10, 1 << 16)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
