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

#include "rstump/config.hpp"

#include <fstream>

#include <gtest/gtest.h>

#include "rstump/error.hpp"
#include "rstump_test_support.hpp"

namespace rstump {
namespace {

using nlohmann::json;

json input_doc() {
  return json::parse(R"({
    "input": {"path": "trial.csv", "response": "y", "treatment": "w",
              "covariates": ["age", {"name": "site", "kind": "categorical"},
                             {"name": "dose", "kind": "numeric", "binning": {"strategy": "quantile", "bins": 4}}]},
    "seed": 3
  })");
}

json generator_doc() {
  return json::parse(R"({
    "generator": {
      "n": 400,
      "covariates": [
        {"name": "g", "kind": "ordinal", "levels": [0, 1, 2, 3], "probabilities": [0.4, 0.3, 0.2, 0.1]},
        {"name": "c", "kind": "categorical", "labels": ["a", "b", "c"]},
        {"name": "u", "kind": "uniform", "min": 0, "max": 5, "binning": {"strategy": "equal_width", "bins": 5}},
        {"name": "z", "kind": "normal", "mean": 1, "sd": 2}
      ],
      "response": {"type": "numeric", "mean": 1.5, "noise_sd": 0.5},
      "assignment": {"type": "fixed", "treated": 200},
      "effects": [{"when": [{"covariate": "g", "op": ">=", "value": 2},
                            {"covariate": "c", "op": "in", "values": ["a", "c"]}], "tau": 0.4}],
      "prognostic": [{"when": [{"covariate": "z", "op": "<", "value": 0}], "shift": -1}],
      "drift": 0.05
    },
    "objectives": "max",
    "min_node_sizes": [20, 40],
    "depth": 2,
    "permutations": 99,
    "alpha": 0.1,
    "honest_fraction": 0.4,
    "centering": "zero",
    "honest_centering": "full",
    "criterion": "mse",
    "binning": {"strategy": "quantile", "bins": 6},
    "interactions": [{"a": "g", "b": "c"}],
    "category_cap": 20
  })");
}

TEST(Config, Defaults) {
  const auto c = parse_config(input_doc(), "/data");
  ASSERT_TRUE(c.input);
  EXPECT_EQ(c.input->path, std::filesystem::path("/data/trial.csv"));
  EXPECT_EQ(c.permutations, 1000u);
  EXPECT_EQ(c.alpha, 0.05);
  EXPECT_EQ(c.binning.bin_count, 10);
  EXPECT_EQ(c.binning.strategy, BinStrategy::kEqualWidth);
  EXPECT_EQ(c.min_node_sizes, (std::vector<std::size_t>{100, 150, 200}));
  EXPECT_EQ(c.depth, 3u);
  EXPECT_EQ(c.objectives.size(), 2u);
  EXPECT_FALSE(c.honest_fraction);
  EXPECT_EQ(c.seed, 3u);
  ASSERT_EQ(c.input->schema.covariates.size(), 3u);
  EXPECT_EQ(c.input->schema.covariates[0].kind, ColumnKind::kNumeric);
  EXPECT_EQ(c.input->schema.covariates[1].kind, ColumnKind::kCategorical);
  EXPECT_EQ(c.input->schema.covariates[2].binning->bin_count, 4);
}

TEST(Config, GeneratorFields) {
  const auto c = parse_config(generator_doc());
  ASSERT_TRUE(c.generator);
  const auto& g = *c.generator;
  EXPECT_EQ(g.n, 400u);
  EXPECT_EQ(g.covariates.size(), 4u);
  EXPECT_FALSE(g.response.binary);
  EXPECT_TRUE(g.assignment.fixed);
  ASSERT_EQ(g.effects.size(), 1u);
  EXPECT_EQ(g.effects[0].when[1].op, ConditionOp::kIn);
  EXPECT_EQ(g.effects[0].when[1].labels, (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(c.objectives, std::vector<Direction>{Direction::kMaxAte});
  EXPECT_EQ(c.criterion, Criterion::kDeltaMse);
  EXPECT_EQ(c.honest_centering, HonestCentering::kFullGlobal);
  EXPECT_EQ(c.centering, Centering::kZero);
  EXPECT_EQ(c.interactions.size(), 1u);
}

TEST(Config, Template) {
  const auto c = parse_config(json::parse(R"({"generator": {"template": "probation", "n": 900, "tau": 0.2}})"));
  ASSERT_TRUE(c.generator);
  EXPECT_EQ(c.generator->n, 900u);
  EXPECT_EQ(c.generator->covariates.size(), 9u);
  ASSERT_EQ(c.interactions.size(), 1u);
  EXPECT_EQ(c.interactions[0].a, "gender");
  EXPECT_EQ(c.generator->effects[0].shift, 0.2);
  EXPECT_THROW(parse_config(json::parse(R"({"generator": {"template": "other"}})")), ConfigError);
}

TEST(Config, RoundTrip) {
  for (const auto& doc : {input_doc(), generator_doc(),
                          json::parse(R"({"generator": {"template": "probation"}, "objectives": "both"})")}) {
    const auto c = parse_config(doc, "/base");
    const auto echo = to_json(c);
    const auto again = parse_config(echo, "/elsewhere");
    EXPECT_EQ(to_json(again), echo) << echo.dump(2);
  }
}

TEST(Config, UnknownKeysRejected) {
  const std::vector<std::pair<std::string, json>> typos{
      {"/permutation", 10},
      {"/input/respons", "y"},
      {"/binning/bin", 4},
      {"/input/covariates/1/kinds", "categorical"},
  };
  for (const auto& [pointer, value] : typos) {
    auto doc = input_doc();
    doc[json::json_pointer(pointer)] = value;
    EXPECT_THROW(parse_config(doc), ConfigError) << pointer;
  }
  auto g = generator_doc();
  g["generator"]["covariates"][0]["mean"] = 1;
  EXPECT_THROW(parse_config(g), ConfigError);
  g = generator_doc();
  g["generator"]["effects"][0]["shift"] = 1;
  EXPECT_THROW(parse_config(g), ConfigError);
  g = generator_doc();
  g["generator"]["response"]["base_rate"] = 0.2;
  EXPECT_THROW(parse_config(g), ConfigError);
}

TEST(Config, InvalidValues) {
  const std::vector<std::pair<std::string, json>> bad{
      {"/alpha", 1.5},         {"/alpha", 0},          {"/permutations", 0},   {"/min_node_sizes", json::array()},
      {"/objectives", "both!"}, {"/depth", 0},          {"/honest_fraction", 1}, {"/centering", "median"},
      {"/binning/bins", 1},    {"/seed", -1},          {"/seed", "one"},       {"/category_cap", 64},
      {"/min_node_sizes", json::array({10, 10})},        {"/objectives", json::array({"max", "max"})},
  };
  for (const auto& [pointer, value] : bad) {
    auto doc = input_doc();
    doc[json::json_pointer(pointer)] = value;
    EXPECT_THROW(parse_config(doc), ConfigError) << pointer << " = " << value;
  }
  auto both = input_doc();
  both["generator"] = json::parse(R"({"template": "probation"})");
  EXPECT_THROW(parse_config(both), ConfigError);
  EXPECT_THROW(parse_config(json::object()), ConfigError);
}

TEST(Config, LoadFromFile) {
  const auto dir = testing::scratch_dir("config_load");
  {
    std::ofstream out(dir / "run.json");
    out << input_doc().dump();
  }
  const auto c = load_config(dir / "run.json");
  EXPECT_EQ(c.input->path, dir / "trial.csv");
  {
    std::ofstream out(dir / "broken.json");
    out << "{\"seed\": ";
  }
  EXPECT_THROW(load_config(dir / "broken.json"), ConfigError);
  EXPECT_THROW(load_config(dir / "absent.json"), ConfigError);
}

TEST(Config, EffectiveSchemaFoldsRunSettings) {
  auto doc = input_doc();
  doc["binning"] = json::parse(R"({"strategy": "quantile", "bins": 3})");
  doc["interactions"] = json::parse(R"([{"a": "age", "b": "site"}])");
  const auto s = parse_config(doc).effective_schema();
  EXPECT_EQ(s.binning.bin_count, 3);
  EXPECT_EQ(s.interactions.size(), 1u);
  EXPECT_EQ(s.category_cap, 32u);
}

}  // namespace
}  // namespace rstump
