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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rstump/data.hpp"
#include "rstump/honest.hpp"
#include "rstump/stump.hpp"
#include "rstump/synthetic.hpp"

namespace rstump {

struct InputConfig {
  std::filesystem::path path;  // absolute after loading
  Schema schema;               // binning and interactions come from RunConfig
};

// Machine form of an analysis run. Exactly one of `input` and `generator`
// is set. Defaults: B = 1000, alpha = .05, ten equal-width bins, sizes
// {100, 150, 200}, depth 3, both objectives.
struct RunConfig {
  std::optional<InputConfig> input;
  std::optional<GeneratorSpec> generator;
  BinningSpec binning;
  std::vector<InteractionSpec> interactions;
  std::size_t category_cap = 32;
  std::vector<Direction> objectives{Direction::kMaxAte, Direction::kMinAte};
  std::vector<std::size_t> min_node_sizes{100, 150, 200};
  std::size_t depth = 3;
  std::size_t permutations = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::optional<double> honest_fraction;
  Centering centering = Centering::kEstimatedGlobal;
  HonestCentering honest_centering = HonestCentering::kTestGlobal;
  Criterion criterion = Criterion::kCenteredAte;
  std::filesystem::path output_dir = "rstump-out";

  // Schema for the input file with the run-level binning, interactions and
  // category cap folded in.
  Schema effective_schema() const;
};

// Unknown keys are rejected so that typos fail loudly. Relative paths are
// resolved against `base_dir`. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Checks the cross-field invariants (one data source, objectives and sizes
// non-empty, B >= 1, 0 < alpha < 1, ...). parse_config calls it.
void validate_config(const RunConfig& config);

// Fully resolved echo; parse_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& config);

nlohmann::json to_json(const BinningSpec& binning);
nlohmann::json to_json(const GeneratorSpec& spec);
GeneratorSpec generator_from_json(const nlohmann::json& j);

}  // namespace rstump
