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

#include "rstump/splits.hpp"

#include <bit>

#include "rstump/error.hpp"

namespace rstump {
namespace {

std::vector<std::size_t> level_counts(const Covariate& cov) {
  std::vector<std::size_t> counts(cov.level_count(), 0);
  for (auto c : cov.codes) ++counts[c];
  return counts;
}

std::string join_labels(const Covariate& cov, std::uint64_t mask) {
  std::string out = "{";
  bool first = true;
  for (std::size_t level = 0; level < cov.level_count() && level < 64; ++level) {
    if (!(mask >> level & 1u)) continue;
    if (!first) out += ",";
    out += cov.level_labels[level];
    first = false;
  }
  return out + "}";
}

}  // namespace

bool Split::goes_left(LevelCode code) const {
  if (const auto* t = std::get_if<ThresholdRule>(&rule)) return code <= t->level;
  const auto& s = std::get<SubsetRule>(rule);
  return code < 64 && (s.left_mask >> code & 1u);
}

SplitUniverse enumerate_splits_or_empty(const Dataset& data, std::size_t min_node_size,
                                        const std::set<std::string>& excluded) {
  if (min_node_size < 1) throw ConfigError("min_node_size must be at least 1");
  SplitUniverse universe;
  universe.min_node_size = min_node_size;
  const std::size_t n = data.size();

  for (std::size_t ci = 0; ci < data.covariates().size(); ++ci) {
    const auto& cov = data.covariate(ci);
    if (excluded.contains(cov.name)) continue;
    const auto counts = level_counts(cov);
    std::vector<LevelCode> observed;
    for (std::size_t l = 0; l < counts.size(); ++l) {
      if (counts[l] > 0) observed.push_back(static_cast<LevelCode>(l));
    }
    if (observed.size() < 2) continue;

    auto admit = [&](SplitRule rule, std::size_t n_left) {
      const std::size_t n_right = n - n_left;
      if (n_left < min_node_size || n_right < min_node_size) return;
      universe.splits.push_back(Split{ci, cov.name, rule, n_left, n_right});
    };

    if (cov.kind == CovariateKind::kOrdered) {
      std::size_t cumulative = 0;
      for (std::size_t i = 0; i + 1 < observed.size(); ++i) {
        cumulative += counts[observed[i]];
        admit(ThresholdRule{observed[i]}, cumulative);
      }
      continue;
    }

    const std::size_t k = observed.size();
    if (k > kMaxSubsetLevels || observed.back() >= 64) {
      throw DataError("categorical covariate '" + cov.name + "' has " + std::to_string(k) +
                      " observed levels; subset enumeration supports at most " +
                      std::to_string(kMaxSubsetLevels));
    }
    // The lowest observed level is always on the left; the other k-1 levels
    // are assigned by the bits of `rest`, excluding the all-left case.
    const std::uint64_t rest_limit = (std::uint64_t{1} << (k - 1)) - 1;
    for (std::uint64_t rest = 0; rest < rest_limit; ++rest) {
      std::uint64_t mask = std::uint64_t{1} << observed[0];
      std::size_t n_left = counts[observed[0]];
      for (std::uint64_t bits = rest; bits; bits &= bits - 1) {
        const auto j = static_cast<std::size_t>(std::countr_zero(bits)) + 1;
        mask |= std::uint64_t{1} << observed[j];
        n_left += counts[observed[j]];
      }
      admit(SubsetRule{mask}, n_left);
    }
  }
  return universe;
}

SplitUniverse enumerate_splits(const Dataset& data, std::size_t min_node_size,
                               const std::set<std::string>& excluded) {
  auto universe = enumerate_splits_or_empty(data, min_node_size, excluded);
  if (universe.splits.empty()) {
    throw EmptyUniverseError("no partition satisfies the size constraint (min_node_size = " +
                             std::to_string(min_node_size) + ", n = " + std::to_string(data.size()) + ")");
  }
  return universe;
}

Children apply_split(const Split& split, const Dataset& data) {
  if (split.covariate >= data.covariates().size() || data.covariate(split.covariate).name != split.covariate_name) {
    throw DataError("split refers to covariate '" + split.covariate_name + "' which is not in the data");
  }
  const auto& codes = data.covariate(split.covariate).codes;
  Children children;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    (split.goes_left(codes[i]) ? children.left : children.right).push_back(i);
  }
  return children;
}

std::string rule_string(const Split& split, const Dataset& data) {
  const auto& cov = data.covariate(split.covariate);
  if (const auto* t = std::get_if<ThresholdRule>(&split.rule)) {
    return cov.name + " <= " + cov.level_labels[t->level];
  }
  return cov.name + " in " + join_labels(cov, std::get<SubsetRule>(split.rule).left_mask);
}

std::string complement_rule_string(const Split& split, const Dataset& data) {
  const auto& cov = data.covariate(split.covariate);
  if (const auto* t = std::get_if<ThresholdRule>(&split.rule)) {
    return cov.name + " > " + cov.level_labels[t->level];
  }
  return cov.name + " not in " + join_labels(cov, std::get<SubsetRule>(split.rule).left_mask);
}

}  // namespace rstump
