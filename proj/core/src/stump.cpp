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

#include "rstump/error.hpp"
#include "rstump/parallel.hpp"
#include "rstump/search.hpp"

namespace rstump {
namespace {

struct Candidate {
  std::size_t split_index = 0;
  Side side = Side::kLeft;
  double score = 0.0;
  bool found = false;
};

// Higher score wins; equal scores keep the earlier candidate.
void offer(Candidate& best, std::size_t index, Side side, double score) {
  if (!best.found || score > best.score) best = Candidate{index, side, score, true};
}

Candidate better_of(const Candidate& a, const Candidate& b) {
  if (!a.found) return b;
  if (!b.found) return a;
  return b.score > a.score ? b : a;
}

Candidate scan_chunk(const LevelTable& table, std::span<const Split> splits, std::size_t offset,
                     Direction direction, Criterion criterion, bool& any_t) {
  const double sign = direction == Direction::kMaxAte ? 1.0 : -1.0;
  const double parent_mse = criterion == Criterion::kDeltaMse ? node_mse(table.total()) : 0.0;
  const double n = static_cast<double>(table.total().size());
  Candidate best;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    const auto lm = table.left(splits[i]);
    const auto rm = table.right(splits[i]);
    const auto l = evaluate_child(lm);
    const auto r = evaluate_child(rm);
    any_t = any_t || (l.evaluable && l.se > 0.0) || (r.evaluable && r.se > 0.0);
    if (criterion == Criterion::kCenteredAte) {
      // Compare the uncentered difference: the centering constant is shared
      // by every candidate, so the choice cannot depend on it.
      if (l.evaluable) offer(best, offset + i, Side::kLeft, sign * l.ate);
      if (r.evaluable) offer(best, offset + i, Side::kRight, sign * r.ate);
    } else {
      if (!l.evaluable && !r.evaluable) continue;
      const double p = static_cast<double>(lm.size()) / n;
      const double gain = delta_loss(parent_mse, node_mse(lm), node_mse(rm), p);
      Side side = Side::kLeft;
      if (!l.evaluable || (r.evaluable && sign * r.ate > sign * l.ate)) side = Side::kRight;
      offer(best, offset + i, side, gain);
    }
  }
  return best;
}

}  // namespace

double centering_value(const Dataset& data, Centering centering) {
  return centering == Centering::kZero ? 0.0 : global_ate(data).ate;
}

StumpFit fit_stump(const Dataset& data, Direction direction, std::size_t min_node_size,
                   const std::set<std::string>& excluded, const SearchOptions& options) {
  const auto universe = enumerate_splits(data, min_node_size, excluded);
  const LevelTable table(data);
  const std::span<const Split> splits(universe.splits);

  // Contiguous chunks reduced in order give the same answer for any worker count.
  const std::size_t workers = std::min(resolve_workers(options.workers), splits.size());
  const std::size_t chunk = (splits.size() + workers - 1) / workers;
  const std::size_t chunks = (splits.size() + chunk - 1) / chunk;
  std::vector<Candidate> partial(chunks);
  std::vector<char> partial_t(chunks, 0);
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    const std::size_t len = std::min(chunk, splits.size() - begin);
    bool any_t = false;
    partial[c] = scan_chunk(table, splits.subspan(begin, len), begin, direction, options.criterion, any_t);
    partial_t[c] = any_t;
  });
  Candidate best;
  bool any_t = false;
  for (std::size_t c = 0; c < chunks; ++c) {
    best = better_of(best, partial[c]);
    any_t = any_t || partial_t[c];
  }
  if (!best.found || !any_t) {
    throw DegenerateError("every candidate node is degenerate (fewer than two units per arm or zero variance)"
                          " at min_node_size = " + std::to_string(min_node_size));
  }

  const Split& split = universe.splits[best.split_index];
  const auto children = apply_split(split, data);
  const double center = centering_value(data, options.centering);
  const auto& chosen = best.side == Side::kLeft ? children.left : children.right;
  const auto& other = best.side == Side::kLeft ? children.right : children.left;

  StumpFit fit;
  fit.split = split;
  fit.selected = best.side;
  fit.split_rule = rule_string(split, data);
  fit.rule = best.side == Side::kLeft ? fit.split_rule : complement_rule_string(split, data);
  fit.effect = center_effect(estimate_effect(node_moments(data, chosen)), center);
  const auto other_m = node_moments(data, other);
  if (has_arm_minimum(other_m)) fit.other_effect = center_effect(estimate_effect(other_m), center);
  fit.selected_n = chosen.size();
  fit.other_n = other.size();
  fit.min_node_size = min_node_size;
  fit.dropped_covariates.assign(excluded.begin(), excluded.end());
  if (options.criterion == Criterion::kDeltaMse) fit.delta_loss = best.score;
  return fit;
}

std::vector<StumpFit> fit_sequence(const Dataset& data, Direction direction, std::size_t min_node_size,
                                   std::size_t depth, const SearchOptions& options) {
  if (depth < 1) throw ConfigError("sequence depth must be at least 1");
  std::vector<StumpFit> fits;
  std::set<std::string> excluded;
  std::vector<std::string> order;  // dropped names in selection order
  for (std::size_t rank = 1; rank <= depth; ++rank) {
    StumpFit fit;
    try {
      fit = fit_stump(data, direction, min_node_size, excluded, options);
    } catch (const DegenerateError&) {
      if (rank == 1) throw;
      break;  // nothing usable among the remaining covariates
    }
    fit.rank = rank;
    fit.dropped_covariates = order;
    excluded.insert(fit.split.covariate_name);
    order.push_back(fit.split.covariate_name);
    fits.push_back(std::move(fit));
  }
  return fits;
}

std::vector<TunedFit> tune(const Dataset& data, Direction direction, std::span<const std::size_t> sizes,
                           std::size_t depth, const SearchOptions& options) {
  if (sizes.empty()) throw ConfigError("at least one minimum node size is required");
  std::vector<TunedFit> out;
  for (auto size : sizes) {
    TunedFit slot;
    slot.min_node_size = size;
    try {
      slot.fits = fit_sequence(data, direction, size, depth, options);
    } catch (const DegenerateError& e) {
      slot.note = e.what();
    }
    out.push_back(std::move(slot));
  }
  return out;
}

std::optional<std::size_t> extreme_slot(std::span<const TunedFit> tuned, Direction direction) {
  std::optional<std::size_t> best;
  const double sign = direction == Direction::kMaxAte ? 1.0 : -1.0;
  for (std::size_t i = 0; i < tuned.size(); ++i) {
    if (tuned[i].fits.empty()) continue;
    if (!best || sign * tuned[i].fits.front().effect.centered > sign * tuned[*best].fits.front().effect.centered) {
      best = i;
    }
  }
  return best;
}

std::string_view to_string(Direction d) { return d == Direction::kMaxAte ? "max" : "min"; }
std::string_view to_string(Side s) { return s == Side::kLeft ? "left" : "right"; }
std::string_view to_string(Centering c) { return c == Centering::kZero ? "zero" : "global"; }

}  // namespace rstump
