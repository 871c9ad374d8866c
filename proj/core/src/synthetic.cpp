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

#include "rstump/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rstump/error.hpp"
#include "rstump/random.hpp"

namespace rstump {
namespace {

std::size_t level_count(const GeneratedCovariate& c) {
  switch (c.kind) {
    case GeneratedKind::kOrdinal: return c.values.size();
    case GeneratedKind::kCategorical: return c.labels.size();
    default: return 0;
  }
}

// Index drawn from (unnormalised) weights, or uniformly when there are none.
std::size_t draw_index(Rng& rng, std::size_t count, const std::vector<double>& weights, double total) {
  if (weights.empty()) return static_cast<std::size_t>(uniform_below(rng, count));
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    acc += weights[j];
    if (u < acc) return j;
  }
  // Rounding at the top end: last level with positive weight.
  for (std::size_t j = weights.size(); j-- > 0;) {
    if (weights[j] > 0.0) return j;
  }
  return weights.size() - 1;
}

struct UnitValues {
  std::vector<double> number;       // numeric kinds (and ordinal values)
  std::vector<std::string> label;   // categorical kinds
};

bool holds(const Condition& cond, std::size_t cov, const GeneratedCovariate& spec,
           const std::vector<UnitValues>& columns, std::size_t unit) {
  if (spec.kind == GeneratedKind::kCategorical) {
    const auto& v = columns[cov].label[unit];
    switch (cond.op) {
      case ConditionOp::kEq:
      case ConditionOp::kIn: return std::find(cond.labels.begin(), cond.labels.end(), v) != cond.labels.end();
      default: return false;  // rejected by validate_spec
    }
  }
  const double v = columns[cov].number[unit];
  switch (cond.op) {
    case ConditionOp::kLe: return v <= cond.numbers[0];
    case ConditionOp::kLt: return v < cond.numbers[0];
    case ConditionOp::kGe: return v >= cond.numbers[0];
    case ConditionOp::kGt: return v > cond.numbers[0];
    case ConditionOp::kEq:
    case ConditionOp::kIn: return std::find(cond.numbers.begin(), cond.numbers.end(), v) != cond.numbers.end();
  }
  return false;
}

std::size_t covariate_position(const GeneratorSpec& spec, const std::string& name) {
  for (std::size_t i = 0; i < spec.covariates.size(); ++i) {
    if (spec.covariates[i].name == name) return i;
  }
  throw ConfigError("subgroup condition references unknown covariate '" + name + "'");
}

void validate_subgroups(const GeneratorSpec& spec, const std::vector<Subgroup>& groups, const char* what) {
  for (const auto& g : groups) {
    if (!std::isfinite(g.shift)) throw ConfigError(std::string(what) + " shift must be finite");
    if (g.when.empty()) throw ConfigError(std::string(what) + " needs at least one condition");
    for (const auto& c : g.when) {
      const auto& cov = spec.covariates[covariate_position(spec, c.covariate)];
      const bool single = c.op != ConditionOp::kIn;
      if (cov.kind == GeneratedKind::kCategorical) {
        if (c.op != ConditionOp::kEq && c.op != ConditionOp::kIn) {
          throw ConfigError("categorical covariate '" + cov.name + "' only supports == and in");
        }
        if (c.labels.empty() || (single && c.labels.size() != 1)) {
          throw ConfigError("condition on '" + cov.name + "' needs " + (single ? "one label" : "labels"));
        }
        for (const auto& l : c.labels) {
          if (std::find(cov.labels.begin(), cov.labels.end(), l) == cov.labels.end()) {
            throw ConfigError("condition on '" + cov.name + "' uses unknown label '" + l + "'");
          }
        }
      } else if (c.numbers.empty() || (single && c.numbers.size() != 1)) {
        throw ConfigError("condition on '" + cov.name + "' needs " + (single ? "one number" : "numbers"));
      }
    }
  }
}

}  // namespace

void validate_spec(const GeneratorSpec& spec) {
  if (spec.n < 4) throw ConfigError("generator: n must be at least 4");
  if (spec.covariates.empty()) throw ConfigError("generator: at least one covariate is required");
  std::set<std::string> names{kGeneratedResponse, kGeneratedTreatment};
  for (const auto& c : spec.covariates) {
    if (c.name.empty()) throw ConfigError("generator: covariate names must be non-empty");
    if (!names.insert(c.name).second) {
      throw ConfigError("generator: covariate name '" + c.name + "' is duplicated or reserved");
    }
    if (c.kind == GeneratedKind::kOrdinal || c.kind == GeneratedKind::kCategorical) {
      const auto k = level_count(c);
      if (k == 0) throw ConfigError("generator: covariate '" + c.name + "' has no levels");
      if (!c.probabilities.empty()) {
        if (c.probabilities.size() != k) {
          throw ConfigError("generator: covariate '" + c.name + "' has " + std::to_string(k) + " levels but " +
                            std::to_string(c.probabilities.size()) + " probabilities");
        }
        double total = 0.0;
        for (double p : c.probabilities) {
          if (!(p >= 0.0) || !std::isfinite(p)) {
            throw ConfigError("generator: probabilities of '" + c.name + "' must be finite and >= 0");
          }
          total += p;
        }
        if (!(total > 0.0)) throw ConfigError("generator: probabilities of '" + c.name + "' sum to zero");
      }
      if (c.kind == GeneratedKind::kCategorical) {
        std::set<std::string> seen(c.labels.begin(), c.labels.end());
        if (seen.size() != c.labels.size()) throw ConfigError("generator: duplicate labels in '" + c.name + "'");
      } else if (!std::all_of(c.values.begin(), c.values.end(), [](double v) { return std::isfinite(v); })) {
        throw ConfigError("generator: ordinal values of '" + c.name + "' must be finite");
      }
    } else if (c.kind == GeneratedKind::kUniform && !(c.a < c.b)) {
      throw ConfigError("generator: uniform covariate '" + c.name + "' needs a < b");
    } else if (c.kind == GeneratedKind::kNormal && !(c.b > 0.0)) {
      throw ConfigError("generator: normal covariate '" + c.name + "' needs sd > 0");
    }
  }
  if (spec.response.binary) {
    if (!(spec.response.base_rate >= 0.0 && spec.response.base_rate <= 1.0)) {
      throw ConfigError("generator: base rate must lie in [0, 1]");
    }
  } else if (!(spec.response.noise_sd >= 0.0) || !std::isfinite(spec.response.mean)) {
    throw ConfigError("generator: numeric response needs a finite mean and noise_sd >= 0");
  }
  if (spec.assignment.fixed) {
    if (spec.assignment.treated == 0 || spec.assignment.treated >= spec.n) {
      throw ConfigError("generator: fixed assignment needs 0 < treated < n");
    }
  } else if (!(spec.assignment.probability > 0.0 && spec.assignment.probability < 1.0)) {
    throw ConfigError("generator: assignment probability must lie strictly between 0 and 1");
  }
  if (!std::isfinite(spec.drift)) throw ConfigError("generator: drift must be finite");
  validate_subgroups(spec, spec.effects, "planted effect");
  validate_subgroups(spec, spec.prognostic, "prognostic shift");
}

GeneratedData generate(const GeneratorSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  const std::size_t n = spec.n;
  GeneratedData out;

  // Covariates.
  auto cov_rng = make_stream(seed, 0);
  std::vector<UnitValues> columns(spec.covariates.size());
  std::vector<double> totals(spec.covariates.size(), 0.0);
  for (std::size_t c = 0; c < spec.covariates.size(); ++c) {
    const auto& p = spec.covariates[c].probabilities;
    totals[c] = std::accumulate(p.begin(), p.end(), 0.0);
    if (spec.covariates[c].kind == GeneratedKind::kCategorical) {
      columns[c].label.resize(n);
    } else {
      columns[c].number.resize(n);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < spec.covariates.size(); ++c) {
      const auto& cov = spec.covariates[c];
      switch (cov.kind) {
        case GeneratedKind::kOrdinal:
          columns[c].number[i] = cov.values[draw_index(cov_rng, cov.values.size(), cov.probabilities, totals[c])];
          break;
        case GeneratedKind::kCategorical:
          columns[c].label[i] = cov.labels[draw_index(cov_rng, cov.labels.size(), cov.probabilities, totals[c])];
          break;
        case GeneratedKind::kUniform: columns[c].number[i] = cov.a + (cov.b - cov.a) * uniform01(cov_rng); break;
        case GeneratedKind::kNormal: columns[c].number[i] = cov.a + cov.b * standard_normal(cov_rng); break;
      }
    }
  }

  // Subgroup membership.
  auto members = [&](const Subgroup& g) {
    std::vector<std::uint8_t> in(n, 1);
    for (const auto& cond : g.when) {
      const auto pos = covariate_position(spec, cond.covariate);
      for (std::size_t i = 0; i < n; ++i) {
        if (in[i] && !holds(cond, pos, spec.covariates[pos], columns, i)) in[i] = 0;
      }
    }
    return in;
  };
  auto& truth = out.truth;
  truth.in_subgroup.assign(n, 0);
  std::vector<double> effect(n, spec.drift);
  for (const auto& g : spec.effects) {
    auto in = members(g);
    for (std::size_t i = 0; i < n; ++i) {
      if (in[i]) {
        effect[i] += g.shift;
        truth.in_subgroup[i] = 1;
      }
    }
    truth.membership.push_back(std::move(in));
  }
  std::vector<double> baseline(n, spec.response.binary ? spec.response.base_rate : spec.response.mean);
  for (const auto& g : spec.prognostic) {
    const auto in = members(g);
    for (std::size_t i = 0; i < n; ++i) baseline[i] += in[i] ? g.shift : 0.0;
  }

  // Potential outcomes. Both share one draw per unit, so a unit without an
  // effect has identical outcomes under both arms.
  auto outcome_rng = make_stream(seed, 1);
  truth.y_treated.resize(n);
  truth.y_control.resize(n);
  truth.tau.resize(n);
  truth.expected_tau.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.response.binary) {
      const double raw_c = baseline[i];
      const double raw_t = baseline[i] + effect[i];
      const double pc = std::clamp(raw_c, 0.0, 1.0);
      const double pt = std::clamp(raw_t, 0.0, 1.0);
      if (pc != raw_c || pt != raw_t) ++truth.clamped;
      const double u = uniform01(outcome_rng);
      truth.y_control[i] = u < pc ? 1.0 : 0.0;
      truth.y_treated[i] = u < pt ? 1.0 : 0.0;
      truth.expected_tau[i] = pt - pc;
    } else {
      const double noise = spec.response.noise_sd * standard_normal(outcome_rng);
      truth.y_control[i] = baseline[i] + noise;
      truth.y_treated[i] = baseline[i] + effect[i] + noise;
      truth.expected_tau[i] = effect[i];
    }
    truth.tau[i] = truth.y_treated[i] - truth.y_control[i];
  }
  if (truth.clamped > 0) {
    out.warnings.push_back("success probabilities of " + std::to_string(truth.clamped) +
                           " units were clamped to [0, 1]");
  }

  // Assignment, independent of everything above.
  auto assign_rng = make_stream(seed, 2);
  std::vector<std::uint8_t> w(n, 0);
  if (spec.assignment.fixed) {
    std::fill(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(spec.assignment.treated), 1);
    shuffle(std::span<std::uint8_t>(w), assign_rng);
  } else {
    for (auto& x : w) x = bernoulli(assign_rng, spec.assignment.probability) ? 1 : 0;
  }
  const auto treated = static_cast<std::size_t>(std::count(w.begin(), w.end(), 1));
  if (treated == 0 || treated == n) {
    throw DegenerateError("generator: Bernoulli assignment left an arm empty (n = " + std::to_string(n) + ")");
  }

  // Table and schema.
  std::vector<std::string> y_cells(n), w_cells(n);
  for (std::size_t i = 0; i < n; ++i) {
    y_cells[i] = format_double(w[i] ? truth.y_treated[i] : truth.y_control[i]);
    w_cells[i] = w[i] ? "1" : "0";
  }
  out.table.add_column(kGeneratedResponse, std::move(y_cells));
  out.table.add_column(kGeneratedTreatment, std::move(w_cells));
  out.schema.response = kGeneratedResponse;
  out.schema.treatment = kGeneratedTreatment;
  out.schema.binning = spec.binning;
  out.schema.interactions = spec.interactions;
  for (std::size_t c = 0; c < spec.covariates.size(); ++c) {
    const auto& cov = spec.covariates[c];
    std::vector<std::string> cells;
    if (cov.kind == GeneratedKind::kCategorical) {
      cells = std::move(columns[c].label);
    } else {
      cells.reserve(n);
      for (double v : columns[c].number) cells.push_back(format_double(v));
    }
    out.table.add_column(cov.name, std::move(cells));
    CovariateSchema cs;
    cs.name = cov.name;
    cs.kind = cov.kind == GeneratedKind::kCategorical ? ColumnKind::kCategorical
              : cov.kind == GeneratedKind::kOrdinal   ? ColumnKind::kOrdinal
                                                      : ColumnKind::kNumeric;
    cs.binning = cov.binning;
    out.schema.covariates.push_back(std::move(cs));
  }
  return out;
}

SimulatedDataset simulate_dataset(const GeneratorSpec& spec, std::uint64_t seed) {
  auto gen = generate(spec, seed);
  auto loaded = build_dataset(gen.table, gen.schema);
  return SimulatedDataset{std::move(loaded.data), std::move(gen.truth), std::move(gen.warnings)};
}

GeneratorSpec probation_template(std::size_t n, double tau_local, double base_rate) {
  GeneratorSpec s;
  s.n = n;
  s.response.binary = true;
  s.response.base_rate = base_rate;

  auto numeric = [](std::string name, GeneratedKind kind, double a, double b) {
    GeneratedCovariate c;
    c.name = std::move(name);
    c.kind = kind;
    c.a = a;
    c.b = b;
    return c;
  };
  auto ordinal = [](std::string name, std::vector<double> probabilities) {
    GeneratedCovariate c;
    c.name = std::move(name);
    c.kind = GeneratedKind::kOrdinal;
    for (std::size_t j = 0; j < probabilities.size(); ++j) c.values.push_back(static_cast<double>(j));
    c.probabilities = std::move(probabilities);
    return c;
  };
  auto categorical = [](std::string name, std::vector<std::string> labels, std::vector<double> probabilities) {
    GeneratedCovariate c;
    c.name = std::move(name);
    c.kind = GeneratedKind::kCategorical;
    c.labels = std::move(labels);
    c.probabilities = std::move(probabilities);
    return c;
  };

  s.covariates.push_back(numeric("birth_year", GeneratedKind::kUniform, 1940.0, 1990.0));
  s.covariates.push_back(categorical("gender", {"female", "male"}, {0.2, 0.8}));
  s.covariates.push_back(categorical("race", {"black", "other", "white"}, {0.6, 0.1, 0.3}));
  s.covariates.push_back(numeric("age_first_charge", GeneratedKind::kNormal, 22.0, 5.0));
  s.covariates.push_back(numeric("years_since_charge", GeneratedKind::kUniform, 0.0, 10.0));
  s.covariates.push_back(numeric("age_at_start", GeneratedKind::kNormal, 33.0, 10.0));
  s.covariates.push_back(ordinal("drug_priors", {0.5, 0.2, 0.12, 0.08, 0.06, 0.04}));
  s.covariates.push_back(ordinal("priors", {0.25, 0.18, 0.14, 0.11, 0.09, 0.07, 0.06, 0.04, 0.03, 0.03}));
  // P(probations > 6) = 0.0744, about 116 of 1559.
  s.covariates.push_back(
      ordinal("probations", {0.30, 0.20, 0.14, 0.10, 0.08, 0.06, 0.0456, 0.03, 0.02, 0.0144, 0.01}));
  s.interactions.push_back(InteractionSpec{"gender", "probations", BinningSpec{BinStrategy::kQuantile, 4}});

  if (tau_local != 0.0) {
    Condition c;
    c.covariate = "probations";
    c.op = ConditionOp::kGt;
    c.numbers = {6.0};
    s.effects.push_back(Subgroup{{c}, tau_local});
  }
  return s;
}

RawTable truth_table(const Truth& truth, std::span<const std::uint8_t> treatment) {
  const std::size_t n = truth.tau.size();
  std::vector<std::string> unit(n), w(n), yt(n), yc(n), tau(n), etau(n), sub(n);
  for (std::size_t i = 0; i < n; ++i) {
    unit[i] = std::to_string(i);
    w[i] = i < treatment.size() ? (treatment[i] ? "1" : "0") : "";
    yt[i] = format_double(truth.y_treated[i]);
    yc[i] = format_double(truth.y_control[i]);
    tau[i] = format_double(truth.tau[i]);
    etau[i] = format_double(truth.expected_tau[i]);
    sub[i] = truth.in_subgroup[i] ? "1" : "0";
  }
  RawTable t;
  t.add_column("unit", std::move(unit));
  t.add_column("w", std::move(w));
  t.add_column("y_t", std::move(yt));
  t.add_column("y_c", std::move(yc));
  t.add_column("tau", std::move(tau));
  t.add_column("expected_tau", std::move(etau));
  t.add_column("subgroup", std::move(sub));
  return t;
}

std::string_view to_string(GeneratedKind kind) {
  switch (kind) {
    case GeneratedKind::kOrdinal: return "ordinal";
    case GeneratedKind::kCategorical: return "categorical";
    case GeneratedKind::kUniform: return "uniform";
    case GeneratedKind::kNormal: return "normal";
  }
  return "ordinal";
}

std::string_view to_string(ConditionOp op) {
  switch (op) {
    case ConditionOp::kLe: return "<=";
    case ConditionOp::kLt: return "<";
    case ConditionOp::kGe: return ">=";
    case ConditionOp::kGt: return ">";
    case ConditionOp::kEq: return "==";
    case ConditionOp::kIn: return "in";
  }
  return "==";
}

}  // namespace rstump
