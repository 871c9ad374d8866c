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
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rstump/data.hpp"
#include "rstump/effects.hpp"
#include "rstump/splits.hpp"

namespace rstump {

enum class Direction { kMaxAte, kMinAte };
enum class Side { kLeft, kRight };

// What the local effects are centered on.
enum class Centering {
  kEstimatedGlobal,  // the estimated global ATE of the data being searched
  kZero,
};

// How the split is chosen. kCenteredAte is the max/min local-effect rule;
// kDeltaMse picks the split with the largest reduction in the residual MSE
// of Y on W, then takes the child favoured by the direction. The second is
// only a baseline for comparison.
enum class Criterion { kCenteredAte, kDeltaMse };

struct SearchOptions {
  Centering centering = Centering::kEstimatedGlobal;
  Criterion criterion = Criterion::kCenteredAte;
  std::size_t workers = 1;
};

struct StumpFit {
  Split split;
  Side selected = Side::kLeft;
  std::string rule;        // human-readable rule of the selected child
  std::string split_rule;  // rule of the left child, identifies the split
  CenteredEffect effect;   // selected child
  std::optional<CenteredEffect> other_effect;  // empty when it lacks two units per arm
  std::size_t selected_n = 0;
  std::size_t other_n = 0;
  std::size_t min_node_size = 0;
  std::size_t rank = 1;
  std::vector<std::string> dropped_covariates;
  double delta_loss = 0.0;  // filled for Criterion::kDeltaMse
};

// Exhaustive search over every (split, child) pair of the admissible
// universe. Ties go to the earlier covariate, then the earlier rule, then
// the left child. Children without two units per arm are skipped. A child
// with zero standard error stays selectable (its t is reported as
// undefined), but the search fails when no candidate has a defined t.
StumpFit fit_stump(const Dataset& data, Direction direction, std::size_t min_node_size,
                   const std::set<std::string>& excluded = {}, const SearchOptions& options = {});

// Rank r excludes the splitting covariates of ranks 1..r-1. Stops early
// when nothing admissible remains.
std::vector<StumpFit> fit_sequence(const Dataset& data, Direction direction, std::size_t min_node_size,
                                   std::size_t depth, const SearchOptions& options = {});

struct TunedFit {
  std::size_t min_node_size = 0;
  std::vector<StumpFit> fits;  // ranks 1..depth; empty when the size admits nothing
  std::string note;            // reason for an empty slot
};

// One independent fit (sequence) per size; a size that admits no split or
// only degenerate nodes yields an empty slot rather than an error.
std::vector<TunedFit> tune(const Dataset& data, Direction direction, std::span<const std::size_t> sizes,
                           std::size_t depth = 1, const SearchOptions& options = {});

// Index of the slot whose rank-1 fit has the most extreme centered effect
// in the given direction; empty if every slot is empty.
std::optional<std::size_t> extreme_slot(std::span<const TunedFit> tuned, Direction direction);

double centering_value(const Dataset& data, Centering centering);

std::string_view to_string(Direction d);
std::string_view to_string(Side s);
std::string_view to_string(Centering c);

}  // namespace rstump
