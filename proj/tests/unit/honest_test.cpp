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

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_statistics_double.h>
#include <gtest/gtest.h>

#include "rstump/error.hpp"
#include "rstump/synthetic.hpp"
#include "rstump_test_support.hpp"

namespace rstump {
namespace {

Dataset trial(std::size_t n, std::uint64_t seed, double tau = 0.0) {
  GeneratorSpec spec;
  spec.n = n;
  spec.covariates.push_back({"g", GeneratedKind::kOrdinal, {0, 1, 2, 3, 4}, {}, {}, 0, 1, std::nullopt});
  spec.covariates.push_back({"c", GeneratedKind::kCategorical, {}, {"p", "q", "r"}, {}, 0, 1, std::nullopt});
  spec.covariates.push_back({"u", GeneratedKind::kUniform, {}, {}, {}, 0, 1, std::nullopt});
  if (tau != 0.0) spec.effects.push_back(Subgroup{{Condition{"g", ConditionOp::kGe, {3}, {}}}, tau});
  return simulate_dataset(spec, seed).data;
}

TEST(SplitData, HalvesAndDeterminism) {
  const auto d = trial(1000, 1);
  const auto s = split_data(d, 0.5, 9);
  EXPECT_EQ(s.train.size(), 500u);
  EXPECT_EQ(s.test.size(), 500u);
  const auto again = split_data(d, 0.5, 9);
  EXPECT_EQ(s.train, again.train);
  EXPECT_EQ(s.test, again.test);
  EXPECT_NE(s.train, split_data(d, 0.5, 10).train);
  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i], i);
  EXPECT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
  EXPECT_EQ(split_data(d, 0.3, 9).train.size(), 300u);
}

TEST(SplitData, Errors) {
  const auto d = trial(50, 1);
  EXPECT_THROW(split_data(d, 0.0, 1), ConfigError);
  EXPECT_THROW(split_data(d, 1.0, 1), ConfigError);
  EXPECT_THROW(split_data(d, 0.001, 1), DegenerateError);
  // a test half of two units cannot always cover both arms
  Dataset tiny({1, 2, 3, 4}, {1, 1, 0, 0}, {testing::ordered("x", {0, 1, 0, 1})});
  std::size_t failures = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    try {
      split_data(tiny, 0.5, seed);
    } catch (const DegenerateError&) {
      ++failures;
    }
  }
  EXPECT_GT(failures, 0u);
}

TEST(SplitData, ArmSharesStayClose) {
  const auto d = trial(1500, 2);
  const double share = static_cast<double>(d.treated_count()) / d.size();
  std::size_t close = 0;
  double mean_gap = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto s = split_data(d, 0.5, seed);
    for (const auto* half : {&s.train, &s.test}) {
      std::size_t t = 0;
      for (auto i : *half) t += d.treatment()[i];
      const double gap = static_cast<double>(t) / half->size() - share;
      close += std::abs(gap) <= 0.03;
      mean_gap += gap / 2000;
    }
  }
  EXPECT_GE(close, 1900u);
  EXPECT_LT(std::abs(mean_gap), 0.002);
}

TEST(HonestEstimate, FullDataIdentity) {
  const auto d = trial(600, 3, 0.3);
  const auto fit = fit_stump(d, Direction::kMaxAte, 50);
  DataSplit same;
  same.train.resize(d.size());
  std::iota(same.train.begin(), same.train.end(), 0);
  same.test = same.train;
  for (auto c : {HonestCentering::kTestGlobal, HonestCentering::kFullGlobal}) {
    const auto h = honest_estimate(fit, d, same, Direction::kMaxAte, c);
    ASSERT_TRUE(h.effect);
    EXPECT_EQ(h.effect->centered, fit.effect.centered);
    EXPECT_EQ(h.effect->local.se, fit.effect.local.se);
    EXPECT_EQ(*h.effect->t, *fit.effect.t);
    EXPECT_EQ(h.units.size(), fit.selected_n);
    EXPECT_EQ(h.node_rule, fit.rule);
  }
}

TEST(HonestEstimate, WholeTestSetCentersToZero) {
  const auto d = trial(400, 4);
  const auto s = split_data(d, 0.5, 4);
  auto fit = fit_stump(d.subset(s.train), Direction::kMaxAte, 20);
  // a threshold above every level sends everything left
  fit.split.rule = ThresholdRule{1000};
  fit.selected = Side::kLeft;
  const auto h = honest_estimate(fit, d, s, Direction::kMaxAte);
  EXPECT_EQ(h.units, s.test);
  ASSERT_TRUE(h.effect);
  EXPECT_NEAR(h.effect->centered, 0.0, 1e-15);
}

TEST(HonestEstimate, EmptyNodeIsReported) {
  const auto d = trial(400, 5);
  const auto s = split_data(d, 0.5, 5);
  auto fit = fit_stump(d.subset(s.train), Direction::kMaxAte, 20);
  fit.split.rule = ThresholdRule{1000};
  fit.selected = Side::kRight;
  const auto h = honest_estimate(fit, d, s, Direction::kMaxAte);
  EXPECT_TRUE(h.units.empty());
  EXPECT_FALSE(h.effect);
  EXPECT_FALSE(h.estimable());
  EXPECT_FALSE(h.note.empty());
}

TEST(HonestProperty, WelchMatchesTextbook) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto d = trial(300 + seed * 7, seed, seed % 2 ? 0.2 : 0.0);
    const auto s = split_data(d, 0.5, seed);
    const auto fit = fit_stump(d.subset(s.train), seed % 3 ? Direction::kMaxAte : Direction::kMinAte, 25);
    const auto dir = seed % 3 ? Direction::kMaxAte : Direction::kMinAte;
    const auto h = honest_estimate(fit, d, s, dir);
    ASSERT_TRUE(h.estimable());
    std::vector<double> t, c, tt, tc;
    for (auto i : h.units) (d.treatment()[i] ? t : c).push_back(d.response()[i]);
    for (auto i : s.test) (d.treatment()[i] ? tt : tc).push_back(d.response()[i]);
    const double center = gsl_stats_mean(tt.data(), 1, tt.size()) - gsl_stats_mean(tc.data(), 1, tc.size());
    const double a = gsl_stats_variance(t.data(), 1, t.size()) / t.size();
    const double b = gsl_stats_variance(c.data(), 1, c.size()) / c.size();
    const double diff = gsl_stats_mean(t.data(), 1, t.size()) - gsl_stats_mean(c.data(), 1, c.size());
    const double stat = (diff - center) / std::sqrt(a + b);
    const double df = (a + b) * (a + b) / (a * a / (t.size() - 1) + b * b / (c.size() - 1));
    EXPECT_NEAR(*h.df, df, 1e-8 * df);
    EXPECT_NEAR(*h.p_two_sided, 2 * gsl_cdf_tdist_Q(std::abs(stat), df), 1e-10);
    const double one = dir == Direction::kMaxAte ? gsl_cdf_tdist_Q(stat, df) : gsl_cdf_tdist_P(stat, df);
    EXPECT_NEAR(*h.p_one_sided, one, 1e-10);
  }
}

TEST(HonestProperty, NoTrainingUnitContributes) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto d = trial(500, seed + 100, 0.25);
    const auto s = split_data(d, 0.5, seed);
    const auto fit = fit_stump(d.subset(s.train), Direction::kMaxAte, 30);
    const auto h = honest_estimate(fit, d, s, Direction::kMaxAte);
    for (auto i : h.units) ASSERT_TRUE(std::binary_search(s.test.begin(), s.test.end(), i));
    // scrambling every training response leaves the result unchanged
    std::vector<double> y(d.response().begin(), d.response().end());
    for (auto i : s.train) y[i] = 1000.0 + static_cast<double>(i % 7);
    const auto h2 = honest_estimate(fit, d.with_response(y), s, Direction::kMaxAte);
    EXPECT_EQ(h.units, h2.units);
    ASSERT_EQ(h.effect.has_value(), h2.effect.has_value());
    if (h.effect) {
      EXPECT_EQ(h.effect->centered, h2.effect->centered);
      EXPECT_EQ(h.p_two_sided, h2.p_two_sided);
    }
  }
}

TEST(HonestAnalysis, TunesOnTrainingHalf) {
  const auto d = trial(800, 6, 0.3);
  const std::vector<std::size_t> sizes{40, 80};
  const auto a = honest_analysis(d, Direction::kMaxAte, sizes, 0.5, 6);
  ASSERT_TRUE(a.chosen);
  ASSERT_TRUE(a.result);
  EXPECT_EQ(a.tuned.size(), 2u);
  for (const auto& slot : a.tuned) {
    EXPECT_LE(slot.fits.size(), 1u);
    if (!slot.fits.empty()) {
      EXPECT_EQ(slot.fits[0].selected_n + slot.fits[0].other_n, a.split.train.size());
    }
  }
  EXPECT_EQ(to_string(HonestCentering::kFullGlobal), "full");
}

}  // namespace
}  // namespace rstump
