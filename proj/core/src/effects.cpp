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

#include "rstump/effects.hpp"

#include <algorithm>
#include <string>

#include "rstump/error.hpp"

namespace rstump {

double ArmMoments::variance() const {
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  if (min == max) return 0.0;
  const double nn = static_cast<double>(n);
  const double ss = sum_sq - sum * sum / nn;
  return std::max(ss, 0.0) / (nn - 1.0);
}

NodeMoments node_moments(const Dataset& data, std::span<const std::size_t> node) {
  NodeMoments m;
  const auto y = data.response();
  const auto w = data.treatment();
  for (auto i : node) m.add(y[i], w[i] != 0);
  return m;
}

EffectEstimate estimate_effect(const NodeMoments& m) {
  if (m.treated.n == 0 || m.control.n == 0) {
    throw DegenerateError("node has an empty arm (" + std::to_string(m.treated.n) + " treated, " +
                          std::to_string(m.control.n) + " control)");
  }
  EffectEstimate e;
  e.n_t = m.treated.n;
  e.n_c = m.control.n;
  e.mean_t = m.treated.mean();
  e.mean_c = m.control.mean();
  e.ate = e.mean_t - e.mean_c;
  e.var_t = m.treated.variance();
  e.var_c = m.control.variance();
  if (e.n_t >= 2 && e.n_c >= 2) {
    e.se = std::sqrt(e.var_t / static_cast<double>(e.n_t) + e.var_c / static_cast<double>(e.n_c));
  }
  return e;
}

double CenteredEffect::welch_df() const {
  const double a = local.var_t / static_cast<double>(local.n_t);
  const double b = local.var_c / static_cast<double>(local.n_c);
  const double num = (a + b) * (a + b);
  const double den = a * a / static_cast<double>(local.n_t - 1) + b * b / static_cast<double>(local.n_c - 1);
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num / den;
}

CenteredEffect center_effect(const EffectEstimate& local, double global_ate) {
  if (!local.has_se()) {
    throw DegenerateError("node needs at least two units per arm (" + std::to_string(local.n_t) + " treated, " +
                          std::to_string(local.n_c) + " control)");
  }
  CenteredEffect c;
  c.local = local;
  c.global_ate = global_ate;
  c.centered = local.ate - global_ate;
  if (local.se > 0.0) c.t = c.centered / local.se;
  return c;
}

EffectEstimate global_ate(const Dataset& data) {
  NodeMoments m;
  const auto y = data.response();
  const auto w = data.treatment();
  for (std::size_t i = 0; i < data.size(); ++i) m.add(y[i], w[i] != 0);
  return estimate_effect(m);
}

CenteredEffect local_effect(const Dataset& data, std::span<const std::size_t> node, double global) {
  const auto m = node_moments(data, node);
  if (!has_arm_minimum(m)) {
    throw DegenerateError("node needs at least two units per arm (" + std::to_string(m.treated.n) + " treated, " +
                          std::to_string(m.control.n) + " control)");
  }
  auto effect = center_effect(estimate_effect(m), global);
  if (!effect.t) throw DegenerateError("degenerate node: responses are constant within both arms (se = 0)");
  return effect;
}

double delta_loss(double parent_loss, double left_loss, double right_loss, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("delta_loss: proportion must lie strictly between 0 and 1");
  return parent_loss - p * left_loss - (1.0 - p) * right_loss;
}

double node_mse(const NodeMoments& m) {
  auto ess = [](const ArmMoments& a) {
    if (a.n == 0 || a.min == a.max) return 0.0;
    return std::max(a.sum_sq - a.sum * a.sum / static_cast<double>(a.n), 0.0);
  };
  const auto n = m.size();
  if (n == 0) return 0.0;
  return (ess(m.treated) + ess(m.control)) / static_cast<double>(n);
}

}  // namespace rstump
