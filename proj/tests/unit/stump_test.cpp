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

#include "rstump/stump.hpp"

#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "rstump/error.hpp"
#include "rstump/search.hpp"
#include "rstump/synthetic.hpp"
#include "rstump_test_support.hpp"

namespace rstump {
namespace {

using testing::categorical;
using testing::ordered;

TEST(FitStump, FixtureA) {
  const auto d = testing::fixture_a();
  for (std::size_t size : {2, 4}) {
    const auto max = fit_stump(d, Direction::kMaxAte, size);
    EXPECT_EQ(max.split.covariate, 1u);
    EXPECT_EQ(max.split.rule, SplitRule(SubsetRule{0b101}));
    EXPECT_EQ(max.selected, Side::kLeft);
    EXPECT_NEAR(max.effect.centered, 0.26666666666666666, 1e-12);
    EXPECT_NEAR(*max.effect.t, 1.0886621079036347, 1e-12);
    EXPECT_EQ(max.rule, "cat in {a,c}");

    const auto min = fit_stump(d, Direction::kMinAte, size);
    EXPECT_EQ(min.split.covariate, 1u);
    EXPECT_EQ(min.split.rule, SplitRule(SubsetRule{0b011}));
    EXPECT_EQ(min.selected, Side::kLeft);
    EXPECT_NEAR(min.effect.centered, -0.39999999999999997, 1e-12);
    EXPECT_NEAR(*min.effect.t, -0.9669875568304562, 1e-12);
  }
  EXPECT_THROW(fit_stump(d, Direction::kMaxAte, 5), EmptyUniverseError);
}

TEST(FitStump, FixtureB) {
  const auto d = testing::fixture_b();
  const auto max = fit_stump(d, Direction::kMaxAte, 3);
  EXPECT_EQ(max.split.covariate, 2u);
  EXPECT_EQ(max.split.rule, SplitRule(SubsetRule{0b011}));
  EXPECT_EQ(max.selected, Side::kRight);
  EXPECT_EQ(max.rule, "c3 not in {a,b}");
  EXPECT_NEAR(max.effect.centered, 2.2142857142857144, 1e-12);
  EXPECT_NEAR(*max.effect.t, 1.9805173514998138, 1e-12);
  ASSERT_TRUE(max.other_effect);
  EXPECT_EQ(max.selected_n + max.other_n, d.size());

  const auto min = fit_stump(d, Direction::kMinAte, 3);
  EXPECT_EQ(min.split.covariate, 2u);
  EXPECT_EQ(min.split.rule, SplitRule(SubsetRule{0b101}));
  EXPECT_EQ(min.selected, Side::kRight);
  EXPECT_NEAR(min.effect.centered, -1.452380952380952, 1e-12);
  EXPECT_NEAR(*min.effect.t, -0.4833815995676996, 1e-12);
}

TEST(FitStump, SixPointMatchesExhaustiveSearch) {
  const auto d = testing::six_point();
  for (auto dir : {Direction::kMaxAte, Direction::kMinAte}) {
    const auto fit = fit_stump(d, dir, 2);
    const auto oracle = testing::oracle_fit(d, dir, 2);
    ASSERT_TRUE(oracle);
    EXPECT_EQ(fit.selected, oracle->side);
    EXPECT_EQ(apply_split(fit.split, d).left, testing::oracle_splits(d, 2)[oracle->split_index].left);
    EXPECT_NEAR(fit.effect.centered, oracle->centered, 1e-12);
  }
}

TEST(FitStump, SeparatingBinaryCovariate) {
  // units with g = 1 respond to treatment, the others do not
  std::vector<double> y{1, 1, 1, 0, 0, 0, 0, 1, 0, 1, 0, 1, 1, 0, 0, 1};
  std::vector<std::uint8_t> w{1, 1, 1, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 0};
  std::vector<LevelCode> g{1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  Dataset d(y, w, {categorical("g", g)});
  const auto fit = fit_stump(d, Direction::kMaxAte, 2);
  EXPECT_EQ(fit.selected, Side::kRight);
  EXPECT_EQ(fit.rule, "g not in {a}");
  EXPECT_GT(fit.effect.centered, fit.other_effect->centered);
}

TEST(FitStump, ConstantResponseIsDegenerate) {
  Dataset d(std::vector<double>(8, 1.0), {1, 0, 1, 0, 1, 0, 1, 0}, {ordered("x", {0, 0, 0, 0, 1, 1, 1, 1})});
  EXPECT_THROW(fit_stump(d, Direction::kMaxAte, 2), DegenerateError);
}

TEST(FitStump, ZeroSeChildStaysSelectable) {
  // left child: treated all 5, controls all 0, so se = 0 but the gap is huge
  std::vector<double> y{5, 5, 0, 0, 1, 0, 2, 1, 0, 3};
  std::vector<std::uint8_t> w{1, 1, 0, 0, 1, 0, 1, 0, 1, 0};
  Dataset d(y, w, {ordered("x", {0, 0, 0, 0, 1, 1, 1, 1, 1, 1})});
  const auto fit = fit_stump(d, Direction::kMaxAte, 2);
  EXPECT_EQ(fit.selected, Side::kLeft);
  EXPECT_FALSE(fit.effect.t);
  EXPECT_EQ(fit.effect.local.se, 0.0);
}

TEST(FitStumpProperty, MatchesBruteForce) {
  std::size_t compared = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto d = testing::random_dataset(seed);
    for (std::size_t m : {1, 2, 3, 4}) {
      for (auto dir : {Direction::kMaxAte, Direction::kMinAte}) {
        const auto oracle = testing::oracle_fit(d, dir, m);
        const bool any_t = testing::oracle_extreme_t(d, {d.treatment().begin(), d.treatment().end()}, m, dir).has_value();
        if (!oracle || !any_t) {
          EXPECT_THROW(fit_stump(d, dir, m), DegenerateError) << seed;
          continue;
        }
        for (std::size_t workers : {1, 3}) {
          const auto fit = fit_stump(d, dir, m, {}, {Centering::kEstimatedGlobal, Criterion::kCenteredAte, workers});
          const auto split = testing::oracle_splits(d, m)[oracle->split_index];
          ASSERT_EQ(fit.split.covariate, oracle->covariate) << seed;
          ASSERT_EQ(apply_split(fit.split, d).left, split.left) << "seed " << seed << " m " << m;
          ASSERT_EQ(fit.selected, oracle->side) << seed;
          EXPECT_NEAR(fit.effect.centered, oracle->centered, 1e-10);
          ASSERT_EQ(fit.effect.t.has_value(), oracle->t.has_value());
          if (oracle->t) {
            EXPECT_NEAR(*fit.effect.t, *oracle->t, 1e-10);
          }
        }
        ++compared;
      }
    }
  }
  EXPECT_GT(compared, 1000u);
}

TEST(FitStumpProperty, CenteringInvariance) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto d = testing::random_dataset(seed, {16, 30, 4, 5, 9});
    for (auto dir : {Direction::kMaxAte, Direction::kMinAte}) {
      std::optional<StumpFit> a, b;
      try {
        a = fit_stump(d, dir, 2, {}, {Centering::kEstimatedGlobal});
        b = fit_stump(d, dir, 2, {}, {Centering::kZero});
      } catch (const DegenerateError&) {
        continue;
      }
      EXPECT_EQ(a->split, b->split);
      EXPECT_EQ(a->selected, b->selected);
      EXPECT_EQ(b->effect.centered, b->effect.local.ate);
      // any constant c picks the same pair as the uncentered rule
      for (double c : {-3.0, 0.7, 11.0}) {
        const auto o = testing::oracle_fit(d, dir, 2, c);
        EXPECT_EQ(apply_split(a->split, d).left, testing::oracle_splits(d, 2)[o->split_index].left);
        EXPECT_EQ(a->selected, o->side);
      }
    }
  }
}

TEST(FitStumpProperty, NegationSymmetry) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto d = testing::random_dataset(seed, {10, 30, 4, 5, 6});
    std::vector<double> neg(d.response().begin(), d.response().end());
    for (auto& v : neg) v = -v;
    const auto dn = d.with_response(neg);
    std::optional<StumpFit> max_neg, min_orig;
    try {
      max_neg = fit_stump(dn, Direction::kMaxAte, 2);
      min_orig = fit_stump(d, Direction::kMinAte, 2);
    } catch (const DegenerateError&) {
      continue;
    }
    EXPECT_EQ(max_neg->split, min_orig->split);
    EXPECT_EQ(max_neg->selected, min_orig->selected);
    EXPECT_NEAR(max_neg->effect.centered, -min_orig->effect.centered, 1e-12);
  }
}

TEST(FitStumpProperty, DominatesEveryPair) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto d = testing::random_dataset(seed);
    StumpFit fit;
    try {
      fit = fit_stump(d, Direction::kMaxAte, 2);
    } catch (const DegenerateError&) {
      continue;
    }
    const double g = global_ate(d).ate;
    for (const auto& s : enumerate_splits(d, 2).splits) {
      const auto ch = apply_split(s, d);
      for (const auto* node : {&ch.left, &ch.right}) {
        const auto m = node_moments(d, *node);
        if (!has_arm_minimum(m)) continue;
        EXPECT_GE(fit.effect.centered + 1e-12, estimate_effect(m).ate - g);
      }
    }
  }
}

// Residual MSE of Y on W computed unit by unit.
double oracle_mse(const Dataset& d, const std::vector<std::size_t>& node) {
  double sum[2] = {0, 0};
  double count[2] = {0, 0};
  for (auto i : node) {
    sum[d.treatment()[i]] += d.response()[i];
    count[d.treatment()[i]] += 1;
  }
  double ss = 0;
  for (auto i : node) {
    const int a = d.treatment()[i];
    const double r = d.response()[i] - sum[a] / count[a];
    ss += r * r;
  }
  return ss / static_cast<double>(node.size());
}

TEST(FitStump, DeltaMseBaseline) {
  const auto d = testing::six_point();
  const auto fit = fit_stump(d, Direction::kMaxAte, 2, {}, {Centering::kEstimatedGlobal, Criterion::kDeltaMse, 1});
  const std::vector<std::size_t> all{0, 1, 2, 3, 4, 5};
  double best = -1e300;
  for (const auto& s : testing::oracle_splits(d, 2)) {
    const double p = static_cast<double>(s.left.size()) / 6.0;
    best = std::max(best, oracle_mse(d, all) - p * oracle_mse(d, s.left) - (1 - p) * oracle_mse(d, s.right));
  }
  EXPECT_NEAR(fit.delta_loss, best, 1e-12);
  EXPECT_GT(fit.delta_loss, 0.0);
}

TEST(FitSequence, DistinctCovariates) {
  const auto d = testing::fixture_b();
  // c2 tracks w on all but two units, so none of its children has two units
  // per arm and the sequence stops after c3 and o.
  const auto seq = fit_sequence(d, Direction::kMaxAte, 3, 3);
  ASSERT_EQ(seq.size(), 2u);
  std::set<std::size_t> covs;
  for (std::size_t r = 0; r < seq.size(); ++r) {
    EXPECT_EQ(seq[r].rank, r + 1);
    EXPECT_EQ(seq[r].dropped_covariates.size(), r);
    covs.insert(seq[r].split.covariate);
  }
  EXPECT_EQ(covs, (std::set<std::size_t>{0, 2}));
  const auto one = fit_sequence(d, Direction::kMaxAte, 3, 1);
  ASSERT_EQ(one.size(), 1u);
  const auto direct = fit_stump(d, Direction::kMaxAte, 3);
  EXPECT_EQ(one[0].split, direct.split);
  EXPECT_EQ(one[0].selected, direct.selected);
  EXPECT_EQ(one[0].effect.centered, direct.effect.centered);
  EXPECT_EQ(fit_sequence(testing::fixture_a(), Direction::kMaxAte, 2, 3).size(), 2u);
  EXPECT_THROW(fit_sequence(d, Direction::kMaxAte, 3, 0), ConfigError);
}

TEST(FitSequenceProperty, DisjointCovariates) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto d = testing::random_dataset(seed, {12, 30, 4, 5, 5});
    std::vector<StumpFit> seq;
    try {
      seq = fit_sequence(d, Direction::kMinAte, 2, 4);
    } catch (const DegenerateError&) {
      continue;
    }
    std::set<std::string> names;
    for (const auto& f : seq) EXPECT_TRUE(names.insert(f.split.covariate_name).second);
    EXPECT_LE(seq.size(), d.covariates().size());
  }
}

TEST(Tune, EmptySlotForImpossibleSize) {
  const auto d = testing::fixture_b();
  const std::vector<std::size_t> sizes{3, d.size() + 1};
  const auto tuned = tune(d, Direction::kMaxAte, sizes);
  ASSERT_EQ(tuned.size(), 2u);
  EXPECT_FALSE(tuned[0].fits.empty());
  EXPECT_TRUE(tuned[1].fits.empty());
  EXPECT_FALSE(tuned[1].note.empty());
  EXPECT_EQ(extreme_slot(tuned, Direction::kMaxAte), 0u);
  EXPECT_THROW(tune(d, Direction::kMaxAte, std::vector<std::size_t>{}), ConfigError);
}

TEST(Tune, ExtremeSlotUsesCenteredEffect) {
  const auto d = testing::fixture_b();
  const std::vector<std::size_t> sizes{2, 3, 5};
  for (auto dir : {Direction::kMaxAte, Direction::kMinAte}) {
    const auto tuned = tune(d, dir, sizes);
    const auto pick = extreme_slot(tuned, dir);
    ASSERT_TRUE(pick);
    const double sign = dir == Direction::kMaxAte ? 1 : -1;
    for (const auto& slot : tuned) {
      if (!slot.fits.empty()) {
        EXPECT_GE(sign * tuned[*pick].fits[0].effect.centered, sign * slot.fits[0].effect.centered);
      }
    }
  }
}

TEST(Tune, PlantedSubgroupRecovered) {
  GeneratorSpec spec;
  spec.n = 1500;
  GeneratedCovariate g{"group", GeneratedKind::kOrdinal, {0, 1, 2, 3, 4, 5, 6, 7}, {}, {}, 0, 1, std::nullopt};
  g.probabilities = {.12, .12, .12, .12, .12, .14, .13, .13};
  spec.covariates.push_back(g);
  for (int c = 0; c < 4; ++c) {
    spec.covariates.push_back({"noise" + std::to_string(c), GeneratedKind::kUniform, {}, {}, {}, 0, 1, std::nullopt});
  }
  spec.effects.push_back(Subgroup{{Condition{"group", ConditionOp::kGe, {6}, {}}}, 0.3});
  const auto sim = simulate_dataset(spec, 3);
  const std::vector<std::size_t> sizes{100, 150, 200};
  const auto tuned = tune(sim.data, Direction::kMaxAte, sizes);
  const auto pick = extreme_slot(tuned, Direction::kMaxAte);
  ASSERT_TRUE(pick);
  EXPECT_EQ(tuned[*pick].fits[0].split.covariate_name, "group");
}

TEST(Determinism, WorkerCountDoesNotMatter) {
  const auto d = testing::random_dataset(5, {30, 30, 4, 5, 4});
  const auto a = fit_stump(d, Direction::kMaxAte, 2, {}, {Centering::kEstimatedGlobal, Criterion::kCenteredAte, 1});
  for (std::size_t w : {2, 4, 8}) {
    const auto b = fit_stump(d, Direction::kMaxAte, 2, {}, {Centering::kEstimatedGlobal, Criterion::kCenteredAte, w});
    EXPECT_EQ(a.split, b.split);
    EXPECT_EQ(a.selected, b.selected);
    EXPECT_EQ(a.effect.centered, b.effect.centered);
  }
}

}  // namespace
}  // namespace rstump
