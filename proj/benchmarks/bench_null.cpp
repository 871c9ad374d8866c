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

#include <vector>

#include "rstump/inference.hpp"
#include "rstump/synthetic.hpp"

namespace {

void BM_BuildNulls(benchmark::State& state) {
  const auto data = rstump::simulate_dataset(rstump::probation_template(1559), 11).data;
  const std::vector<std::size_t> sizes{100, 150, 200};
  const rstump::NullOptions options{static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(rstump::build_nulls(data, sizes, 100, 3, options));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_BuildNulls)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_PermutedTreatment(benchmark::State& state) {
  const auto data = rstump::simulate_dataset(rstump::probation_template(1559), 11).data;
  std::uint64_t b = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rstump::permuted_treatment(data, 5, b++));
}
BENCHMARK(BM_PermutedTreatment);

}  // namespace
