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

#include "rstump/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rstump/error.hpp"
#include "rstump/parallel.hpp"
#include "rstump/search.hpp"
#include "rstump/splits.hpp"

namespace rstump {
namespace {

// The admissible sets are nested in the size (a split admissible at size s
// is admissible at every smaller size), so the union over all tuning sizes
// is the universe of the smallest one.
SplitUniverse union_universe(const Dataset& data, std::span<const std::size_t> sizes) {
  if (sizes.empty()) throw ConfigError("at least one minimum node size is required");
  const auto smallest = *std::min_element(sizes.begin(), sizes.end());
  auto universe = enumerate_splits_or_empty(data, smallest);
  if (universe.splits.empty()) {
    throw EmptyUniverseError("no partition satisfies the size constraint for any tuning size (smallest = " +
                             std::to_string(smallest) + ", n = " + std::to_string(data.size()) + ")");
  }
  return universe;
}

TExtremes extremes_for(const Dataset& data, std::span<const std::uint8_t> treatment,
                       std::span<const Split> splits, Centering centering) {
  const LevelTable table(data, treatment);
  double center = 0.0;
  if (centering == Centering::kEstimatedGlobal) center = estimate_effect(table.total()).ate;
  auto ext = scan_t_extremes(table, splits, center);
  if (ext.finite == 0) {
    throw DegenerateError("no admissible node has a defined t-value under this assignment "
                          "(too few units per arm or zero variance everywhere)");
  }
  return ext;
}

NullDistribution make_null(Direction direction, std::span<const std::size_t> sizes, std::size_t count,
                           std::uint64_t seed, Centering centering, bool exact) {
  NullDistribution null;
  null.direction = direction;
  null.permutations = count;
  null.sizes.assign(sizes.begin(), sizes.end());
  null.seed = seed;
  null.centering = centering;
  null.exact = exact;
  null.values.resize(count);
  return null;
}

}  // namespace

std::vector<std::uint8_t> permuted_treatment(const Dataset& data, std::uint64_t seed, std::uint64_t index) {
  std::vector<std::uint8_t> w(data.treatment().begin(), data.treatment().end());
  auto rng = make_stream(seed, index);
  shuffle(std::span<std::uint8_t>(w), rng);
  return w;
}

Dataset permute_treatment(const Dataset& data, Rng& rng) {
  std::vector<std::uint8_t> w(data.treatment().begin(), data.treatment().end());
  shuffle(std::span<std::uint8_t>(w), rng);
  return data.with_treatment(std::move(w));
}

double extreme_t(const Dataset& data, std::span<const std::uint8_t> treatment, Direction direction,
                 std::span<const std::size_t> sizes, Centering centering) {
  const auto universe = union_universe(data, sizes);
  const auto ext = extremes_for(data, treatment, universe.splits, centering);
  return direction == Direction::kMaxAte ? ext.max_t : ext.min_t;
}

NullPair build_nulls(const Dataset& data, std::span<const std::size_t> sizes, std::size_t permutations,
                     std::uint64_t seed, const NullOptions& options) {
  if (permutations < 1) throw ConfigError("the number of permutations must be at least 1");
  const auto universe = union_universe(data, sizes);
  NullPair out{make_null(Direction::kMaxAte, sizes, permutations, seed, options.centering, false),
               make_null(Direction::kMinAte, sizes, permutations, seed, options.centering, false)};
  parallel_for(permutations, options.workers, [&](std::size_t b) {
    const auto w = permuted_treatment(data, seed, b);
    const auto ext = extremes_for(data, w, universe.splits, options.centering);
    out.max.values[b] = ext.max_t;
    out.min.values[b] = ext.min_t;
  });
  return out;
}

NullDistribution build_null(const Dataset& data, Direction direction, std::span<const std::size_t> sizes,
                            std::size_t permutations, std::uint64_t seed, const NullOptions& options) {
  auto pair = build_nulls(data, sizes, permutations, seed, options);
  return direction == Direction::kMaxAte ? std::move(pair.max) : std::move(pair.min);
}

std::uint64_t binomial_coefficient(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  // acc * (n - k + i) is divisible by i, so after removing gcd(acc, i) the
  // rest of i divides n - k + i and nothing is rounded.
  std::uint64_t acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t g = std::gcd(acc, i);
    std::uint64_t next = 0;
    if (__builtin_mul_overflow(acc / g, (n - k + i) / (i / g), &next)) return std::numeric_limits<std::uint64_t>::max();
    acc = next;
  }
  return acc;
}

NullDistribution exhaustive_null(const Dataset& data, Direction direction, std::span<const std::size_t> sizes,
                                 std::uint64_t cap, const NullOptions& options) {
  const std::size_t n = data.size();
  const std::size_t nt = data.treated_count();
  const auto count = binomial_coefficient(n, nt);
  if (count > cap) {
    throw ConfigError("exhaustive null needs C(" + std::to_string(n) + ", " + std::to_string(nt) + ") = " +
                      std::to_string(count) + " assignments, above the cap of " + std::to_string(cap));
  }
  const auto universe = union_universe(data, sizes);

  // Assignments in lexicographic order of the treated index sets.
  std::vector<std::vector<std::uint8_t>> assignments;
  assignments.reserve(count);
  std::vector<std::uint8_t> w(n, 0);
  std::fill(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(nt), 1);
  do {
    assignments.push_back(w);
  } while (std::prev_permutation(w.begin(), w.end()));

  auto null = make_null(direction, sizes, assignments.size(), 0, options.centering, true);
  parallel_for(assignments.size(), options.workers, [&](std::size_t i) {
    const auto ext = extremes_for(data, assignments[i], universe.splits, options.centering);
    null.values[i] = direction == Direction::kMaxAte ? ext.max_t : ext.min_t;
  });
  return null;
}

RighteousResult righteous_p(double observed_t, const NullDistribution& null, double alpha) {
  if (null.values.empty()) throw ConfigError("righteous_p: the null distribution is empty");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie strictly between 0 and 1");
  const bool upper = null.direction == Direction::kMaxAte;
  const std::size_t size = null.values.size();

  RighteousResult r;
  r.observed_t = observed_t;
  r.alpha = alpha;
  r.null_size = size;
  r.exceedances = static_cast<std::size_t>(std::count_if(null.values.begin(), null.values.end(), [&](double v) {
    return upper ? v >= observed_t : v <= observed_t;
  }));

  // Monte Carlo p-values count the observed statistic as one more draw.
  const std::size_t extra = null.exact ? 0 : 1;
  const auto denom = static_cast<double>(size + extra);
  r.p_value = static_cast<double>(r.exceedances + extra) / denom;

  // p <= alpha  <=>  exceedances <= m, with m = floor(alpha * denom) - extra.
  const auto budget = static_cast<long long>(std::floor(alpha * denom + 1e-9)) - static_cast<long long>(extra);
  r.reject = static_cast<long long>(r.exceedances) <= budget;

  std::vector<double> sorted = null.values;
  std::sort(sorted.begin(), sorted.end());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const auto ssize = static_cast<long long>(size);
  if (upper) {
    // t > sorted[size - m - 1]  <=>  at most m values are >= t.
    if (budget < 0) {
      r.critical_value = kInf;
    } else if (budget >= ssize) {
      r.critical_value = -kInf;
    } else {
      r.critical_value = sorted[static_cast<std::size_t>(ssize - budget - 1)];
    }
  } else {
    if (budget < 0) {
      r.critical_value = -kInf;
    } else if (budget >= ssize) {
      r.critical_value = kInf;
    } else {
      r.critical_value = sorted[static_cast<std::size_t>(budget)];
    }
  }
  return r;
}

double naive_p(double t, Direction direction) {
  const double upper_tail = 0.5 * std::erfc(t / std::sqrt(2.0));
  return direction == Direction::kMaxAte ? upper_tail : 1.0 - upper_tail;
}

double empirical_quantile(std::span<const double> values, double q) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace rstump
