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
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rstump/data.hpp"
#include "rstump/effects.hpp"
#include "rstump/splits.hpp"

namespace rstump {

// Per-level node moments of every covariate for one assignment vector.
// Building the table is O(n * covariates); after that each split's
// children are aggregated from level totals without touching units.
class LevelTable {
 public:
  LevelTable(const Dataset& data, std::span<const std::uint8_t> treatment);
  explicit LevelTable(const Dataset& data) : LevelTable(data, data.treatment()) {}

  const NodeMoments& total() const { return total_; }
  NodeMoments left(const Split& split) const;
  NodeMoments right(const Split& split) const;

 private:
  struct CovariateLevels {
    std::vector<NodeMoments> levels;
    std::vector<NodeMoments> prefix;  // prefix[i] = levels 0..i  (ordered only)
    std::vector<NodeMoments> suffix;  // suffix[i] = levels i..k-1 (ordered only)
  };
  std::vector<CovariateLevels> covariates_;
  NodeMoments total_;
};

// One evaluated child of a split.
struct ChildEvaluation {
  bool evaluable = false;  // two units per arm
  double ate = 0.0;        // uncentered local difference in means
  double se = 0.0;
};

ChildEvaluation evaluate_child(const NodeMoments& m);

struct TExtremes {
  double max_t = -std::numeric_limits<double>::infinity();
  double min_t = std::numeric_limits<double>::infinity();
  std::size_t finite = 0;  // number of (split, child) pairs with a defined t
};

// Largest and smallest centered t over every (split, child) pair of the
// universe. Children without two units per arm or with zero standard error
// contribute nothing.
TExtremes scan_t_extremes(const LevelTable& table, std::span<const Split> splits, double centering);

}  // namespace rstump
