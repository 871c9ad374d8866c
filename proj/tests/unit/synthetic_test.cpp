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

#include "rstump/synthetic.hpp"

#include <cmath>
#include <numeric>

#include <gsl/gsl_statistics_double.h>
#include <gtest/gtest.h>

#include "rstump/error.hpp"
#include "rstump/stump.hpp"

namespace rstump {
namespace {

TEST(Generate, ZeroEffectGlobalAteVanishes) {
  const auto spec = probation_template(10000, 0.0);
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto sim = simulate_dataset(spec, seed);
    inside += std::abs(global_ate(sim.data).ate) < 0.03;
  }
  EXPECT_GE(inside, 95);
}

TEST(Generate, ZeroEffectMeansZeroTau) {
  const auto gen = generate(probation_template(2000, 0.0), 5);
  for (double t : gen.truth.tau) ASSERT_EQ(t, 0.0);
  for (double t : gen.truth.expected_tau) ASSERT_EQ(t, 0.0);
  EXPECT_EQ(gen.truth.clamped, 0u);
  EXPECT_TRUE(gen.warnings.empty());
}

TEST(Generate, ProbationTemplateSubgroup) {
  const auto spec = probation_template();
  double members = 0, gap = 0, tau = 0;
  const int reps = 60;
  for (int seed = 0; seed < reps; ++seed) {
    const auto sim = simulate_dataset(spec, static_cast<std::uint64_t>(seed));
    const auto& in = sim.truth.in_subgroup;
    double st = 0, sc = 0, nt = 0, nc = 0, s_tau = 0, m = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (!in[i]) continue;
      ++m;
      s_tau += sim.truth.tau[i];
      if (sim.data.treatment()[i]) {
        st += sim.data.response()[i];
        ++nt;
      } else {
        sc += sim.data.response()[i];
        ++nc;
      }
      EXPECT_DOUBLE_EQ(sim.truth.expected_tau[i], 0.165);
    }
    members += m / reps;
    gap += (st / nt - sc / nc) / reps;
    tau += s_tau / m / reps;
  }
  EXPECT_NEAR(members, 116, 5);
  EXPECT_NEAR(tau, 0.165, 0.02);
  EXPECT_NEAR(gap, 0.165, 0.03);
}

TEST(Generate, TemplateLayout) {
  const auto sim = simulate_dataset(probation_template(), 1);
  EXPECT_EQ(sim.data.size(), 1559u);
  ASSERT_EQ(sim.data.covariates().size(), 10u);
  EXPECT_EQ(sim.data.covariate(9).name, "gender×probations");
  EXPECT_EQ(sim.data.covariate(0).level_count(), 10u);  // binned birth year
  const auto fits = fit_sequence(sim.data, Direction::kMaxAte, 100, 3);
  ASSERT_EQ(fits.size(), 3u);
  EXPECT_NE(fits[0].split.covariate, fits[1].split.covariate);
  EXPECT_NE(fits[1].split.covariate, fits[2].split.covariate);
  EXPECT_NE(fits[0].split.covariate, fits[2].split.covariate);
}

TEST(Generate, AssignmentIndependentOfCovariates) {
  const auto gen = generate(probation_template(10000, 0.165), 8);
  std::vector<double> w;
  for (const auto& c : gen.table.columns[1]) w.push_back(std::stod(c));
  for (std::size_t col = 2; col < gen.table.headers.size(); ++col) {
    std::vector<double> x;
    const auto& cells = gen.table.columns[col];
    const bool numeric = gen.schema.covariates[col - 2].kind != ColumnKind::kCategorical;
    for (const auto& c : cells) x.push_back(numeric ? std::stod(c) : (c == cells[0] ? 1.0 : 0.0));
    EXPECT_LT(std::abs(gsl_stats_correlation(w.data(), 1, x.data(), 1, w.size())), 0.05) << gen.table.headers[col];
  }
}

TEST(Generate, PotentialOutcomesIgnoreAssignment) {
  auto spec = probation_template(500, 0.3);
  const auto a = generate(spec, 11);
  spec.assignment.fixed = true;
  spec.assignment.treated = 100;
  const auto b = generate(spec, 11);
  EXPECT_EQ(a.truth.y_treated, b.truth.y_treated);
  EXPECT_EQ(a.truth.y_control, b.truth.y_control);
  EXPECT_EQ(std::count(b.table.columns[1].begin(), b.table.columns[1].end(), "1"), 100);
  EXPECT_NE(a.table.columns[1], b.table.columns[1]);
  // observed Y is the revealed potential outcome
  for (std::size_t i = 0; i < 500; ++i) {
    const double y = std::stod(b.table.columns[0][i]);
    EXPECT_EQ(y, b.table.columns[1][i] == "1" ? b.truth.y_treated[i] : b.truth.y_control[i]);
  }
}

TEST(Generate, Deterministic) {
  const auto a = generate(probation_template(300), 4);
  const auto b = generate(probation_template(300), 4);
  EXPECT_EQ(a.table.columns, b.table.columns);
  EXPECT_NE(a.table.columns, generate(probation_template(300), 5).table.columns);
}

TEST(Generate, ClampingWarns) {
  GeneratorSpec spec;
  spec.n = 200;
  spec.response.base_rate = 0.9;
  spec.covariates.push_back({"g", GeneratedKind::kOrdinal, {0, 1}, {}, {}, 0, 1, std::nullopt});
  spec.effects.push_back(Subgroup{{Condition{"g", ConditionOp::kEq, {1}, {}}}, 0.3});
  const auto gen = generate(spec, 1);
  EXPECT_GT(gen.truth.clamped, 0u);
  ASSERT_EQ(gen.warnings.size(), 1u);
  for (std::size_t i = 0; i < spec.n; ++i) EXPECT_LE(gen.truth.expected_tau[i], 0.1 + 1e-12);
}

TEST(Generate, NumericResponse) {
  GeneratorSpec spec;
  spec.n = 300;
  spec.response = {false, 0.0, 2.0, 1.5};
  spec.drift = 0.25;
  spec.covariates.push_back({"c", GeneratedKind::kCategorical, {}, {"x", "y", "z"}, {1, 1, 2}, 0, 1, std::nullopt});
  spec.covariates.push_back({"n", GeneratedKind::kNormal, {}, {}, {}, 10, 2, BinningSpec{BinStrategy::kQuantile, 4}});
  spec.effects.push_back(Subgroup{{Condition{"c", ConditionOp::kIn, {}, {"x", "z"}}}, 1.0});
  spec.prognostic.push_back(Subgroup{{Condition{"n", ConditionOp::kGt, {12}, {}}}, 5.0});
  const auto sim = simulate_dataset(spec, 3);
  EXPECT_EQ(sim.data.covariate(1).level_count(), 4u);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double expected = sim.truth.in_subgroup[i] ? 1.25 : 0.25;
    EXPECT_NEAR(sim.truth.tau[i], expected, 1e-12);
  }
}

TEST(ValidateSpec, Rejects) {
  auto base = [] {
    GeneratorSpec s;
    s.n = 100;
    s.covariates.push_back({"g", GeneratedKind::kOrdinal, {0, 1}, {}, {}, 0, 1, std::nullopt});
    s.covariates.push_back({"c", GeneratedKind::kCategorical, {}, {"a", "b"}, {}, 0, 1, std::nullopt});
    return s;
  };
  EXPECT_NO_THROW(validate_spec(base()));
  auto s = base();
  s.effects.push_back(Subgroup{{Condition{"nope", ConditionOp::kEq, {1}, {}}}, 0.1});
  EXPECT_THROW(validate_spec(s), ConfigError);
  s = base();
  s.effects.push_back(Subgroup{{Condition{"c", ConditionOp::kGt, {1}, {}}}, 0.1});
  EXPECT_THROW(validate_spec(s), ConfigError);
  s = base();
  s.effects.push_back(Subgroup{{Condition{"c", ConditionOp::kEq, {}, {"zz"}}}, 0.1});
  EXPECT_THROW(validate_spec(s), ConfigError);
  s = base();
  s.covariates[0].probabilities = {1.0};
  EXPECT_THROW(validate_spec(s), ConfigError);
  s = base();
  s.covariates.push_back(s.covariates[0]);
  EXPECT_THROW(validate_spec(s), ConfigError);
  s = base();
  s.covariates[0].name = "y";
  EXPECT_THROW(validate_spec(s), ConfigError);
  s = base();
  s.assignment.probability = 1.0;
  EXPECT_THROW(validate_spec(s), ConfigError);
  s = base();
  s.response.base_rate = 1.5;
  EXPECT_THROW(validate_spec(s), ConfigError);
}

TEST(TruthTable, Columns) {
  const auto gen = generate(probation_template(50), 2);
  std::vector<std::uint8_t> w;
  for (const auto& c : gen.table.columns[1]) w.push_back(c == "1");
  const auto t = truth_table(gen.truth, w);
  EXPECT_EQ(t.headers, (std::vector<std::string>{"unit", "w", "y_t", "y_c", "tau", "expected_tau", "subgroup"}));
  EXPECT_EQ(t.row_count(), 50u);
  EXPECT_EQ(t.columns[1], gen.table.columns[1]);
}

}  // namespace
}  // namespace rstump
