// Copyright 2026 The kgt Authors.
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

#include <sstream>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "kgt/dataset_io.h"
#include "kgt/kgtypes.h"
#include "kgt/lineariz.h"
#include "kgt/random.h"

namespace kgt {
namespace {

std::vector<Triple> Graph(Rng& rng, int size) {
  std::vector<Triple> graph;
  for (int i = 0; i < size; ++i) {
    const std::string s = "subject " + std::to_string(rng.Uniform(100));
    const std::string o = "object " + std::to_string(rng.Uniform(100));
    graph.push_back(i % 3 ? Triple::Simple(s, "predicate", o)
                          : Triple::Compound(s, "predicate", o, "start time",
                                             "2001"));
  }
  return graph;
}

void BM_SerializeGraph(benchmark::State& state) {
  Rng rng(1);
  const auto graph = Graph(rng, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(SerializeGraph(graph));
  }
}
BENCHMARK(BM_SerializeGraph)->Arg(4)->Arg(64);

void BM_ParseGraph(benchmark::State& state) {
  Rng rng(2);
  const std::string text = SerializeGraph(Graph(rng, state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ParseGraph(text));
  }
  state.SetBytesProcessed(state.iterations() * text.size());
}
BENCHMARK(BM_ParseGraph)->Arg(4)->Arg(64);

Dataset MakeDataset(Rng& rng, std::size_t n) {
  Dataset dataset;
  for (std::size_t i = 0; i < n; ++i) {
    AlignedExample ex{"Q" + std::to_string(i) + "_0",
                      Sentence{EntityId("Q" + std::to_string(i)), "Title",
                               "Some sentence about the title entity.", 0},
                      {}};
    for (const Triple& t : Graph(rng, 1 + static_cast<int>(rng.Uniform(4)))) {
      ex.matches.push_back({t, Hop::kFirst, 0.9});
    }
    dataset.push_back(std::move(ex));
  }
  return dataset;
}

void BM_WriteDataset(benchmark::State& state) {
  Rng rng(3);
  const Dataset dataset = MakeDataset(rng, state.range(0));
  for (auto _ : state) {
    std::ostringstream out;
    WriteDataset(dataset, out);
    benchmark::DoNotOptimize(out.str());
  }
  state.SetItemsProcessed(state.iterations() * dataset.size());
}
BENCHMARK(BM_WriteDataset)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ReadDataset(benchmark::State& state) {
  Rng rng(4);
  std::ostringstream out;
  WriteDataset(MakeDataset(rng, state.range(0)), out);
  const std::string text = out.str();
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(ReadDataset(in, "bench"));
  }
  state.SetBytesProcessed(state.iterations() * text.size());
}
BENCHMARK(BM_ReadDataset)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace kgt
