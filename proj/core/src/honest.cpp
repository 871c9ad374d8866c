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

#include "rstump/honest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "rstump/error.hpp"
#include "rstump/random.hpp"

namespace rstump {
namespace {

// Kept away from the permutation streams 0..B-1 of the same seed.
constexpr std::uint64_t kHonestStream = 0xA5A5'0000'0000'0001ULL;

void require_both_arms(const Dataset& data, std::span<const std::size_t> rows, const char* half) {
  std::size_t treated = 0;
  for (auto i : rows) treated += data.treatment()[i] != 0;
  if (treated == 0 || treated == rows.size()) {
    throw DegenerateError(std::string("honest split: the ") + half + " half has " + std::to_string(treated) +
                          " treated and " + std::to_string(rows.size() - treated) + " control units");
  }
}

}  // namespace

DataSplit split_data(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("honest fraction must lie strictly between 0 and 1");
  const std::size_t n = data.size();
  const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw DegenerateError("honest split of " + std::to_string(n) + " rows with fraction " + std::to_string(fraction) +
                          " leaves an empty half");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = make_stream(seed, kHonestStream);
  shuffle(std::span<std::size_t>(order), rng);

  DataSplit split;
  split.fraction = fraction;
  split.seed = seed;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  require_both_arms(data, split.train, "training");
  require_both_arms(data, split.test, "test");
  return split;
}

WelchTest welch_test(const CenteredEffect& effect) {
  if (!effect.t) throw DegenerateError("welch test: the standard error is zero");
  WelchTest out;
  out.t = *effect.t;
  out.df = effect.welch_df();
  const boost::math::students_t dist(out.df);
  out.p_upper = boost::math::cdf(boost::math::complement(dist, out.t));
  out.p_lower = boost::math::cdf(dist, out.t);
  out.p_two_sided = std::min(1.0, 2.0 * std::min(out.p_upper, out.p_lower));
  return out;
}

HonestResult honest_estimate(const StumpFit& fit, const Dataset& data, const DataSplit& split, Direction direction,
                             HonestCentering centering) {
  HonestResult r;
  r.node_rule = fit.rule;
  r.selected = fit.selected;
  const auto& cov = data.covariate(fit.split.covariate);
  for (auto i : split.test) {
    const bool left = fit.split.goes_left(cov.codes[i]);
    if (left == (fit.selected == Side::kLeft)) r.units.push_back(i);
  }
  const auto m = node_moments(data, r.units);
  r.test_n_t = m.treated.n;
  r.test_n_c = m.control.n;

  switch (centering) {
    case HonestCentering::kTestGlobal: r.center = estimate_effect(node_moments(data, split.test)).ate; break;
    case HonestCentering::kFullGlobal: r.center = global_ate(data).ate; break;
    case HonestCentering::kZero: r.center = 0.0; break;
  }

  if (!has_arm_minimum(m)) {
    r.note = "insufficient test data in the node (" + std::to_string(r.test_n_t) + " treated, " +
             std::to_string(r.test_n_c) + " control; need 2 per arm)";
    return r;
  }
  r.effect = center_effect(estimate_effect(m), r.center);
  if (!r.effect->t) {
    r.note = "test responses are constant within both arms of the node (se = 0)";
    return r;
  }
  const auto w = welch_test(*r.effect);
  r.df = w.df;
  r.p_two_sided = w.p_two_sided;
  r.p_one_sided = direction == Direction::kMaxAte ? w.p_upper : w.p_lower;
  return r;
}

HonestAnalysis honest_analysis(const Dataset& data, Direction direction, std::span<const std::size_t> sizes,
                               double fraction, std::uint64_t seed, HonestCentering centering,
                               const SearchOptions& options) {
  HonestAnalysis out;
  out.split = split_data(data, fraction, seed);
  const auto train = data.subset(out.split.train);
  out.tuned = tune(train, direction, sizes, 1, options);
  out.chosen = extreme_slot(out.tuned, direction);
  if (!out.chosen) {
    out.note = "no admissible split on the training half";
    return out;
  }
  out.result = honest_estimate(out.tuned[*out.chosen].fits.front(), data, out.split, direction, centering);
  return out;
}

std::string_view to_string(HonestCentering c) {
  switch (c) {
    case HonestCentering::kTestGlobal: return "test";
    case HonestCentering::kFullGlobal: return "full";
    case HonestCentering::kZero: return "zero";
  }
  return "test";
}

}  // namespace rstump
