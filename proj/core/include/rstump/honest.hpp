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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rstump/data.hpp"
#include "rstump/effects.hpp"
#include "rstump/stump.hpp"

namespace rstump {

struct DataSplit {
  std::vector<std::size_t> train;  // ascending row indices
  std::vector<std::size_t> test;   // ascending row indices
  double fraction = 0.5;
  std::uint64_t seed = 0;
};

// Simple random split without replacement; the training half gets
// round(fraction * n) rows. Not stratified by arm. Throws DegenerateError
// when either half misses an arm.
DataSplit split_data(const Dataset& data, double fraction, std::uint64_t seed);

enum class HonestCentering {
  kTestGlobal,  // global ATE of the test half
  kFullGlobal,  // global ATE of the full data
  kZero,
};

struct HonestResult {
  std::string node_rule;
  Side selected = Side::kLeft;
  std::vector<std::size_t> units;  // test rows inside the node, ascending
  std::size_t test_n_t = 0;
  std::size_t test_n_c = 0;
  double center = 0.0;
  std::optional<CenteredEffect> effect;  // empty with fewer than two test units per arm
  // Welch t reference; empty when the effect or its t is undefined.
  std::optional<double> df;
  std::optional<double> p_two_sided;
  std::optional<double> p_one_sided;  // in the direction of the objective
  std::string note;                   // why the estimate is missing, if it is

  bool estimable() const { return p_two_sided.has_value(); }
};

// Drops the test rows through fit.split and tests the selected child's
// centered effect on them alone. `fit` must come from data.subset(split.train).
HonestResult honest_estimate(const StumpFit& fit, const Dataset& data, const DataSplit& split,
                             Direction direction, HonestCentering centering = HonestCentering::kTestGlobal);

// Welch t-test p-values for a centered effect, using the t reference with
// Welch-Satterthwaite degrees of freedom.
struct WelchTest {
  double t = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
  double p_upper = 0.5;
  double p_lower = 0.5;
};
WelchTest welch_test(const CenteredEffect& effect);

struct HonestAnalysis {
  DataSplit split;
  std::vector<TunedFit> tuned;        // fitted on the training rows only
  std::optional<std::size_t> chosen;  // extreme slot among `tuned`
  std::optional<HonestResult> result;
  std::string note;
};

// Split, tune on the training half, take the most extreme slot and estimate
// its rank-1 node on the test half.
HonestAnalysis honest_analysis(const Dataset& data, Direction direction, std::span<const std::size_t> sizes,
                               double fraction, std::uint64_t seed,
                               HonestCentering centering = HonestCentering::kTestGlobal,
                               const SearchOptions& options = {});

std::string_view to_string(HonestCentering c);

}  // namespace rstump
