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
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rstump/table.hpp"

namespace rstump {

using LevelCode = std::uint32_t;

enum class CovariateKind {
  kOrdered,      // numeric, binned numeric or ordinal; splits are thresholds
  kCategorical,  // unordered levels; splits are two-block partitions
};

// One typed covariate column. Level codes run 0..level_count()-1; for ordered
// covariates the codes follow the original numeric order.
struct Covariate {
  std::string name;
  CovariateKind kind = CovariateKind::kOrdered;
  std::vector<LevelCode> codes;
  std::vector<std::string> level_labels;
  // Binned numerics only: level i covers [bin_edges[i], bin_edges[i+1]).
  std::vector<double> bin_edges;

  std::size_t level_count() const { return level_labels.size(); }
};

enum class BinStrategy { kEqualWidth, kQuantile };

struct BinningSpec {
  BinStrategy strategy = BinStrategy::kEqualWidth;
  int bin_count = 10;
};

// Immutable randomized-trial table. Columns are held through shared
// pointers so copies, subsets of the treatment vector and permutation views
// are cheap and safe to hand to concurrent workers.
class Dataset {
 public:
  Dataset(std::vector<double> response, std::vector<std::uint8_t> treatment,
          std::vector<Covariate> covariates);

  std::size_t size() const { return response_->size(); }
  std::span<const double> response() const { return *response_; }
  std::span<const std::uint8_t> treatment() const { return *treatment_; }
  const std::vector<Covariate>& covariates() const { return *covariates_; }
  const Covariate& covariate(std::size_t index) const { return (*covariates_)[index]; }
  std::optional<std::size_t> covariate_index(std::string_view name) const;

  std::size_t treated_count() const { return treated_; }
  std::size_t control_count() const { return size() - treated_; }

  // Same response and covariates, different assignment vector. The new
  // vector must keep both arms non-empty.
  Dataset with_treatment(std::vector<std::uint8_t> treatment) const;

  // Rows in the given order; level codes and labels are kept as-is.
  Dataset subset(std::span<const std::size_t> rows) const;

  Dataset with_response(std::vector<double> response) const;

 private:
  Dataset(std::shared_ptr<const std::vector<double>> response,
          std::shared_ptr<const std::vector<std::uint8_t>> treatment,
          std::shared_ptr<const std::vector<Covariate>> covariates);
  std::size_t validate() const;

  std::shared_ptr<const std::vector<double>> response_;
  std::shared_ptr<const std::vector<std::uint8_t>> treatment_;
  std::shared_ptr<const std::vector<Covariate>> covariates_;
  std::size_t treated_ = 0;
};

// How a raw column becomes a covariate.
enum class ColumnKind {
  kNumeric,      // binned with the schema's (or the column's) BinningSpec
  kOrdinal,      // every distinct numeric value is a level
  kCategorical,  // every distinct label is a level, codes in sorted label order
};

struct CovariateSchema {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  std::optional<BinningSpec> binning;
};

// Interaction covariate built from two raw columns. Numeric sources are
// binned with `binning` (or the schema default) before crossing.
struct InteractionSpec {
  std::string a;
  std::string b;
  std::optional<BinningSpec> binning;
};

struct Schema {
  std::string response;
  std::string treatment;
  std::vector<CovariateSchema> covariates;
  std::vector<InteractionSpec> interactions;
  BinningSpec binning;
  char delimiter = '\0';
  std::size_t category_cap = 32;
};

struct LoadSummary {
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  std::size_t rows_used = 0;
  // Missing-cell counts for used columns that had any, in schema order.
  std::vector<std::pair<std::string, std::size_t>> missing_by_column;
};

struct LoadedData {
  Dataset data;
  LoadSummary summary;
};

LoadedData load_dataset(const std::filesystem::path& path, const Schema& schema);

// Same as load_dataset on an already-parsed table.
LoadedData build_dataset(const RawTable& table, const Schema& schema);

Covariate bin_numeric(std::string name, std::span<const double> values, const BinningSpec& spec);

Covariate make_interaction(const Covariate& a, const Covariate& b, std::size_t category_cap = 32);

// Typed round trip: level codes in a delimited file plus a JSON sidecar
// (<path>.schema.json) with kinds, labels and bin edges.
void save_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset load_coded_dataset(const std::filesystem::path& path);

std::string_view to_string(CovariateKind kind);
std::string_view to_string(ColumnKind kind);
std::string_view to_string(BinStrategy strategy);

}  // namespace rstump
