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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rstump/data.hpp"
#include "rstump/effects.hpp"
#include "rstump/honest.hpp"
#include "rstump/inference.hpp"
#include "rstump/stump.hpp"

namespace rstump {

inline constexpr int kReportSchemaVersion = 1;

// NaN becomes null and infinities the strings "inf" / "-inf", so every
// value survives a JSON round trip.
nlohmann::json json_number(double value);
nlohmann::json json_number(const std::optional<double>& value);

nlohmann::json to_json(const EffectEstimate& e);
nlohmann::json to_json(const CenteredEffect& e);
nlohmann::json to_json(const StumpFit& fit);
nlohmann::json to_json(const RighteousResult& r);
nlohmann::json to_json(const HonestResult& r);
nlohmann::json to_json(const LoadSummary& s);

// min, the quantiles k/6 (k = 1..5, type 7), max, and the critical value
// at alpha.
struct NullSummary {
  double min = 0.0;
  std::vector<double> quantiles;
  double max = 0.0;
  double alpha = 0.05;
  double critical_value = 0.0;
};
NullSummary summarize_null(const NullDistribution& null, double alpha);
nlohmann::json to_json(const NullSummary& s);

struct HistogramFiles {
  std::filesystem::path values;   // <dir>/null_<direction>.tsv
  std::filesystem::path summary;  // <dir>/null_<direction>.summary.json
};

// Two tab-separated columns with a header: permutation index and extreme t.
// Values are written in shortest round-trip form.
HistogramFiles emit_histogram(const NullDistribution& null, double alpha, const std::filesystem::path& dir);

// Values column of a histogram file, in permutation order.
std::vector<double> read_histogram(const std::filesystem::path& path);

// UTC, e.g. "2026-10-15T09:30:00Z".
std::string utc_timestamp();

// Two-space indented, sorted keys, trailing newline.
std::string dump_report(const nlohmann::json& report);

}  // namespace rstump
