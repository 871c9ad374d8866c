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
#include <span>
#include <vector>

#include "rstump/data.hpp"
#include "rstump/random.hpp"
#include "rstump/stump.hpp"

namespace rstump {

// Null distribution of the extreme centered t-value over every admissible
// (split, child) pair and every tuning size, one value per treatment
// permutation.
struct NullDistribution {
  std::vector<double> values;  // values[b] belongs to permutation b
  Direction direction = Direction::kMaxAte;
  std::size_t permutations = 0;
  std::vector<std::size_t> sizes;
  std::uint64_t seed = 0;
  Centering centering = Centering::kEstimatedGlobal;
  // True when values enumerate every assignment with the observed arm
  // sizes (the observed one included) instead of a Monte Carlo sample.
  bool exact = false;
};

struct NullOptions {
  std::size_t workers = 1;
  Centering centering = Centering::kEstimatedGlobal;
};

// Assignment vector of permutation `index` under `seed`: a uniform
// shuffle of the observed vector, so both arm sizes are preserved.
std::vector<std::uint8_t> permuted_treatment(const Dataset& data, std::uint64_t seed, std::uint64_t index);

// Dataset view sharing response and covariates, with W shuffled by rng.
Dataset permute_treatment(const Dataset& data, Rng& rng);

// Extreme centered t for one assignment vector over the union of the
// admissible universes of `sizes`. Throws DegenerateError if no pair has a
// defined t.
double extreme_t(const Dataset& data, std::span<const std::uint8_t> treatment, Direction direction,
                 std::span<const std::size_t> sizes, Centering centering = Centering::kEstimatedGlobal);

// Monte Carlo null from B permutations. Permutation b draws from its own
// stream (seed, b) and lands in slot b, so the result is identical for any
// worker count.
NullDistribution build_null(const Dataset& data, Direction direction, std::span<const std::size_t> sizes,
                            std::size_t permutations, std::uint64_t seed, const NullOptions& options = {});

struct NullPair {
  NullDistribution max;
  NullDistribution min;
};

// Both directions from one pass over the same permutations.
NullPair build_nulls(const Dataset& data, std::span<const std::size_t> sizes, std::size_t permutations,
                     std::uint64_t seed, const NullOptions& options = {});

inline constexpr std::uint64_t kDefaultExhaustiveCap = 200'000;

// Exact null over all C(n, n_t) assignments, in lexicographic order of the
// treated index sets. Throws ConfigError above `cap`.
NullDistribution exhaustive_null(const Dataset& data, Direction direction, std::span<const std::size_t> sizes,
                                 std::uint64_t cap = kDefaultExhaustiveCap, const NullOptions& options = {});

// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial_coefficient(std::uint64_t n, std::uint64_t k);

struct RighteousResult {
  double observed_t = 0.0;
  double p_value = 1.0;
  double critical_value = 0.0;  // may be +-infinity when no value can reject
  double alpha = 0.05;
  std::size_t exceedances = 0;  // null values at least as extreme as observed_t
  std::size_t null_size = 0;
  bool reject = false;
};

// Max direction (min is mirrored):
//   Monte Carlo  p = (1 + #{v >= t}) / (B + 1)
//   exact        p = #{v >= t} / N
// The critical value is the order statistic c for which "t > c" holds
// exactly when p <= alpha.
RighteousResult righteous_p(double observed_t, const NullDistribution& null, double alpha = 0.05);

// One-tailed normal-approximation p-value with no selection adjustment:
// upper tail for the max direction, lower tail for min.
double naive_p(double t, Direction direction = Direction::kMaxAte);

// Type-7 empirical quantile.
double empirical_quantile(std::span<const double> values, double q);

}  // namespace rstump
