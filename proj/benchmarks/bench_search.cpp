// Copyright 2026 The rstump Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <map>

#include "rstump/search.hpp"
#include "rstump/splits.hpp"
#include "rstump/stump.hpp"
#include "rstump/synthetic.hpp"

namespace {

const rstump::Dataset& template_data(std::size_t n) {
  static std::map<std::size_t, rstump::Dataset> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, rstump::simulate_dataset(rstump::probation_template(n), 7).data).first;
  }
  return it->second;
}

void BM_EnumerateSplits(benchmark::State& state) {
  const auto& data = template_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rstump::enumerate_splits(data, 100));
}
BENCHMARK(BM_EnumerateSplits)->Arg(1559)->Arg(10000);

void BM_LevelTable(benchmark::State& state) {
  const auto& data = template_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rstump::LevelTable(data));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LevelTable)->Arg(1559)->Arg(10000)->Arg(100000);

void BM_ScanExtremes(benchmark::State& state) {
  const auto& data = template_data(1559);
  const auto universe = rstump::enumerate_splits(data, 100);
  const rstump::LevelTable table(data);
  for (auto _ : state) benchmark::DoNotOptimize(rstump::scan_t_extremes(table, universe.splits, 0.0));
  state.counters["splits"] = static_cast<double>(universe.splits.size());
}
BENCHMARK(BM_ScanExtremes);

void BM_FitStump(benchmark::State& state) {
  const auto& data = template_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rstump::fit_stump(data, rstump::Direction::kMaxAte, 100));
}
BENCHMARK(BM_FitStump)->Arg(1559)->Arg(10000);

}  // namespace
