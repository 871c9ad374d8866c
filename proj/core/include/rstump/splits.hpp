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
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "rstump/data.hpp"

namespace rstump {

// Left child = level codes <= level.
struct ThresholdRule {
  LevelCode level = 0;
  friend bool operator==(const ThresholdRule&, const ThresholdRule&) = default;
};

// Left child = level codes whose bit is set. Canonical form: the block
// holding the lowest observed level is the left one.
struct SubsetRule {
  std::uint64_t left_mask = 0;
  friend bool operator==(const SubsetRule&, const SubsetRule&) = default;
};

using SplitRule = std::variant<ThresholdRule, SubsetRule>;

struct Split {
  std::size_t covariate = 0;  // index into Dataset::covariates()
  std::string covariate_name;
  SplitRule rule;
  std::size_t n_left = 0;
  std::size_t n_right = 0;

  bool goes_left(LevelCode code) const;
  friend bool operator==(const Split&, const Split&) = default;
};

// Every admissible split of a dataset for one minimum node size, in
// covariate order and then rule order (ascending threshold, ascending mask).
struct SplitUniverse {
  std::vector<Split> splits;
  std::size_t min_node_size = 0;
};

// Categorical covariates with more observed levels than this cannot be
// enumerated (the mask is 64 bits wide).
inline constexpr std::size_t kMaxSubsetLevels = 63;

// Throws EmptyUniverseError when nothing is admissible.
SplitUniverse enumerate_splits(const Dataset& data, std::size_t min_node_size,
                               const std::set<std::string>& excluded = {});

// Same enumeration but returns an empty universe instead of throwing.
SplitUniverse enumerate_splits_or_empty(const Dataset& data, std::size_t min_node_size,
                                        const std::set<std::string>& excluded = {});

struct Children {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
};

Children apply_split(const Split& split, const Dataset& data);

// Stable human-readable rule, used in reports:
//   ordered      "<name> <= <label>"       e.g. "priors <= bin6"
//   categorical  "<name> in {<labels>}"    e.g. "crime_type in {a,c}"
// The right child is the complement ("<name> > <label>", "<name> not in {...}").
std::string rule_string(const Split& split, const Dataset& data);
std::string complement_rule_string(const Split& split, const Dataset& data);

}  // namespace rstump
