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

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>

#include "rstump/data.hpp"

namespace rstump {

// Sufficient statistics of one arm inside one node. min/max let zero
// variance be detected exactly instead of through a rounding-prone
// sum-of-squares difference.
struct ArmMoments {
  std::size_t n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  void add(double y) {
    ++n;
    sum += y;
    sum_sq += y * y;
    if (y < min) min = y;
    if (y > max) max = y;
  }
  void merge(const ArmMoments& o) {
    n += o.n;
    sum += o.sum;
    sum_sq += o.sum_sq;
    if (o.min < min) min = o.min;
    if (o.max > max) max = o.max;
  }
  double mean() const { return sum / static_cast<double>(n); }
  // Sample variance (n-1 denominator); exactly 0 for a constant arm.
  double variance() const;
};

struct NodeMoments {
  ArmMoments treated;
  ArmMoments control;

  void add(double y, bool is_treated) { (is_treated ? treated : control).add(y); }
  void merge(const NodeMoments& o) {
    treated.merge(o.treated);
    control.merge(o.control);
  }
  std::size_t size() const { return treated.n + control.n; }
};

NodeMoments node_moments(const Dataset& data, std::span<const std::size_t> node);

struct EffectEstimate {
  double ate = 0.0;  // treated mean - control mean
  double mean_t = 0.0;
  double mean_c = 0.0;
  std::size_t n_t = 0;
  std::size_t n_c = 0;
  // NaN unless the arm has at least two units.
  double var_t = std::numeric_limits<double>::quiet_NaN();
  double var_c = std::numeric_limits<double>::quiet_NaN();
  // sqrt(var_t/n_t + var_c/n_c); NaN unless both arms have two units.
  double se = std::numeric_limits<double>::quiet_NaN();

  bool has_se() const { return !std::isnan(se); }
};

// Requires at least one unit per arm.
EffectEstimate estimate_effect(const NodeMoments& moments);

struct CenteredEffect {
  EffectEstimate local;
  double global_ate = 0.0;
  double centered = 0.0;    // local.ate - global_ate
  std::optional<double> t;  // centered / local.se; empty when se is 0

  // Welch-Satterthwaite degrees of freedom for the local contrast.
  double welch_df() const;
};

// Builds the centered effect; t is left empty for a zero standard error.
// Requires at least two units per arm.
CenteredEffect center_effect(const EffectEstimate& local, double global_ate);

// True when the node has the two-per-arm minimum needed for a standard error.
inline bool has_arm_minimum(const NodeMoments& m) { return m.treated.n >= 2 && m.control.n >= 2; }

EffectEstimate global_ate(const Dataset& data);

// Throws DegenerateError when an arm has fewer than two units or when the
// standard error is zero.
CenteredEffect local_effect(const Dataset& data, std::span<const std::size_t> node, double global_ate);

// Loss reduction of a split: parent - p * left - (1 - p) * right.
double delta_loss(double parent_loss, double left_loss, double right_loss, double p);

// Residual mean squared error of the least-squares fit of Y on W within a
// node (arm means as fitted values). Loss used by the conventional criterion.
double node_mse(const NodeMoments& m);

}  // namespace rstump
