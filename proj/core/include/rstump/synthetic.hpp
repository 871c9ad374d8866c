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
#include <optional>
#include <string>
#include <vector>

#include "rstump/data.hpp"
#include "rstump/table.hpp"

namespace rstump {

enum class GeneratedKind {
  kOrdinal,      // values[j] with probabilities[j]
  kCategorical,  // labels[j] with probabilities[j]
  kUniform,      // uniform on [a, b)
  kNormal,       // normal with mean a and sd b
};

struct GeneratedCovariate {
  std::string name;
  GeneratedKind kind = GeneratedKind::kOrdinal;
  std::vector<double> values;
  std::vector<std::string> labels;
  std::vector<double> probabilities;  // empty means equiprobable
  double a = 0.0;
  double b = 1.0;
  std::optional<BinningSpec> binning;  // numeric kinds only
};

enum class ConditionOp { kLe, kLt, kGe, kGt, kEq, kIn };

// One clause of a subgroup predicate. Numeric covariates compare against
// `numbers`, categorical ones against `labels`; kIn takes any count, the
// others exactly one.
struct Condition {
  std::string covariate;
  ConditionOp op = ConditionOp::kEq;
  std::vector<double> numbers;
  std::vector<std::string> labels;
};

// Units satisfying every condition get `shift` added.
struct Subgroup {
  std::vector<Condition> when;
  double shift = 0.0;
};

struct ResponseModel {
  bool binary = true;
  double base_rate = 0.18;  // binary
  double mean = 0.0;        // numeric
  double noise_sd = 1.0;    // numeric
};

struct AssignmentModel {
  bool fixed = false;
  double probability = 0.5;        // Bernoulli assignment
  std::size_t treated = 0;         // fixed arm size
};

struct GeneratorSpec {
  std::size_t n = 1000;
  std::vector<GeneratedCovariate> covariates;
  ResponseModel response;
  AssignmentModel assignment;
  std::vector<Subgroup> effects;    // planted local effects on Y_T
  std::vector<Subgroup> prognostic; // shifts applied to both potential outcomes
  double drift = 0.0;               // constant effect for every unit
  BinningSpec binning;
  std::vector<InteractionSpec> interactions;
};

// Potential outcomes and subgroup membership. Never part of the Dataset.
struct Truth {
  std::vector<double> y_treated;
  std::vector<double> y_control;
  std::vector<double> tau;           // y_treated - y_control
  std::vector<double> expected_tau;  // difference of the generating means
  std::vector<std::vector<std::uint8_t>> membership;  // [effect][unit]
  std::vector<std::uint8_t> in_subgroup;              // member of any planted effect
  std::size_t clamped = 0;                            // units whose probability was clamped
};

struct GeneratedData {
  RawTable table;  // columns "y", "w", then the covariates
  Truth truth;
  Schema schema;   // reads `table` back with the declared kinds
  std::vector<std::string> warnings;
};

inline constexpr const char* kGeneratedResponse = "y";
inline constexpr const char* kGeneratedTreatment = "w";

// Throws ConfigError for an invalid spec.
void validate_spec(const GeneratorSpec& spec);

// Covariates come from stream 0 of `seed`, outcome noise from stream 1 and
// the assignment from stream 2, so both potential outcomes exist before W is
// drawn and do not depend on it.
GeneratedData generate(const GeneratorSpec& spec, std::uint64_t seed);

// generate() followed by build_dataset() with the derived schema.
struct SimulatedDataset {
  Dataset data;
  Truth truth;
  std::vector<std::string> warnings;
};
SimulatedDataset simulate_dataset(const GeneratorSpec& spec, std::uint64_t seed);

// Ten covariates shaped like a probation trial: birth year, gender, race,
// age at first charge, years since the last charge, age at sentence start,
// drug priors, all priors, prior probation sentences, and the gender by
// probation-count interaction. Binary re-arrest response. With the defaults
// about 7% of units have more than 6 prior probation sentences and carry
// the planted effect.
GeneratorSpec probation_template(std::size_t n = 1559, double tau_local = 0.165, double base_rate = 0.18);

// Truth table: unit, w, y_t, y_c, tau, expected_tau, subgroup.
RawTable truth_table(const Truth& truth, std::span<const std::uint8_t> treatment);

std::string_view to_string(GeneratedKind kind);
std::string_view to_string(ConditionOp op);

}  // namespace rstump
