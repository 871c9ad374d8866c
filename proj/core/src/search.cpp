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

#include "rstump/search.hpp"

#include <bit>

namespace rstump {

LevelTable::LevelTable(const Dataset& data, std::span<const std::uint8_t> treatment) {
  const auto y = data.response();
  for (std::size_t i = 0; i < y.size(); ++i) total_.add(y[i], treatment[i] != 0);

  covariates_.resize(data.covariates().size());
  for (std::size_t c = 0; c < covariates_.size(); ++c) {
    const auto& cov = data.covariate(c);
    auto& slot = covariates_[c];
    slot.levels.assign(cov.level_count(), NodeMoments{});
    for (std::size_t i = 0; i < y.size(); ++i) slot.levels[cov.codes[i]].add(y[i], treatment[i] != 0);
    if (cov.kind == CovariateKind::kOrdered) {
      const std::size_t k = slot.levels.size();
      slot.prefix.resize(k);
      slot.suffix.resize(k);
      NodeMoments acc;
      for (std::size_t l = 0; l < k; ++l) {
        acc.merge(slot.levels[l]);
        slot.prefix[l] = acc;
      }
      acc = NodeMoments{};
      for (std::size_t l = k; l-- > 0;) {
        acc.merge(slot.levels[l]);
        slot.suffix[l] = acc;
      }
    }
  }
}

NodeMoments LevelTable::left(const Split& split) const {
  const auto& slot = covariates_[split.covariate];
  if (const auto* t = std::get_if<ThresholdRule>(&split.rule)) return slot.prefix[t->level];
  NodeMoments m;
  for (auto bits = std::get<SubsetRule>(split.rule).left_mask; bits; bits &= bits - 1) {
    m.merge(slot.levels[static_cast<std::size_t>(std::countr_zero(bits))]);
  }
  return m;
}

NodeMoments LevelTable::right(const Split& split) const {
  const auto& slot = covariates_[split.covariate];
  if (const auto* t = std::get_if<ThresholdRule>(&split.rule)) return slot.suffix[t->level + 1];
  const auto mask = std::get<SubsetRule>(split.rule).left_mask;
  NodeMoments m;
  for (std::size_t l = 0; l < slot.levels.size(); ++l) {
    if (l < 64 && (mask >> l & 1u)) continue;
    m.merge(slot.levels[l]);
  }
  return m;
}

ChildEvaluation evaluate_child(const NodeMoments& m) {
  ChildEvaluation out;
  if (!has_arm_minimum(m)) return out;
  out.evaluable = true;
  const double nt = static_cast<double>(m.treated.n);
  const double nc = static_cast<double>(m.control.n);
  out.ate = m.treated.sum / nt - m.control.sum / nc;
  out.se = std::sqrt(m.treated.variance() / nt + m.control.variance() / nc);
  return out;
}

TExtremes scan_t_extremes(const LevelTable& table, std::span<const Split> splits, double centering) {
  TExtremes ext;
  auto consider = [&](const NodeMoments& m) {
    const auto e = evaluate_child(m);
    if (!e.evaluable || !(e.se > 0.0)) return;
    const double t = (e.ate - centering) / e.se;
    ++ext.finite;
    if (t > ext.max_t) ext.max_t = t;
    if (t < ext.min_t) ext.min_t = t;
  };
  for (const auto& split : splits) {
    consider(table.left(split));
    consider(table.right(split));
  }
  return ext;
}

}  // namespace rstump
