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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rstump/config.hpp"
#include "rstump/data.hpp"
#include "rstump/honest.hpp"
#include "rstump/inference.hpp"
#include "rstump/stump.hpp"

namespace rstump {

std::string_view version();

struct RunOptions {
  std::size_t workers = 1;  // 0 = one per hardware thread; never affects results
  bool write_files = true;
  std::optional<std::string> timestamp;  // fixed "generated_at" (tests)
};

struct ObjectiveOutcome {
  Direction direction = Direction::kMaxAte;
  std::vector<TunedFit> tuned;
  std::optional<std::size_t> chosen;  // slot of the most extreme rank-1 fit
  NullDistribution null;
  std::optional<RighteousResult> righteous;  // empty when the selected t is undefined
  std::optional<double> naive_p;
  std::optional<HonestAnalysis> honest;
  std::string note;

  const StumpFit* selected() const { return chosen ? &tuned[*chosen].fits.front() : nullptr; }
};

struct AnalysisOutcome {
  EffectEstimate global;
  LoadSummary summary;
  std::vector<ObjectiveOutcome> objectives;
  nlohmann::json report;
  std::vector<std::string> warnings;
  std::filesystem::path report_path;  // empty unless written
};

// Search, righteous inference and the optional honest path on an already
// built dataset. Writes report.json and the histogram files when
// options.write_files is set.
AnalysisOutcome analyze(const Dataset& data, const LoadSummary& summary, const RunConfig& config,
                        const RunOptions& options = {}, std::vector<std::string> warnings = {});

struct PreparedData {
  Dataset data;
  LoadSummary summary;
  std::vector<std::string> warnings;
  std::optional<Truth> truth;   // generator configs only
  std::optional<RawTable> raw;  // generator configs only
};

// Loads the input file or runs the generator (with config.seed).
PreparedData prepare_data(const RunConfig& config);

// prepare_data + analyze.
AnalysisOutcome run(const RunConfig& config, const RunOptions& options = {});

// Generator configs only: also writes simulated.csv and truth.csv to the
// output directory.
AnalysisOutcome simulate(const RunConfig& config, const RunOptions& options = {});

// Dry run: loads the data and reports the split universe per size without
// searching or permuting. Throws on the same problems run() would.
nlohmann::json validate(const RunConfig& config);

}  // namespace rstump
