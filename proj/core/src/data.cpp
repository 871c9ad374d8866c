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

#include "rstump/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rstump/error.hpp"

namespace rstump {
namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::optional<double> parse_number(std::string_view cell) {
  const auto t = trim(cell);
  double value = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string row_context(std::size_t source_row, std::string_view column) {
  // Data rows are 1-based; line numbers count the header.
  return "row " + std::to_string(source_row + 1) + " (line " + std::to_string(source_row + 2) +
         "), column '" + std::string(column) + "'";
}

std::vector<double> numeric_column(const std::vector<std::string>& cells,
                                   std::span<const std::size_t> rows, std::string_view name) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto r : rows) {
    auto v = parse_number(cells[r]);
    if (!v) throw DataError(row_context(r, name) + ": '" + cells[r] + "' is not a finite number");
    out.push_back(*v);
  }
  return out;
}

Covariate ordinal_covariate(std::string name, std::span<const double> values) {
  std::vector<double> levels(values.begin(), values.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  Covariate cov;
  cov.name = std::move(name);
  cov.kind = CovariateKind::kOrdered;
  for (double v : levels) cov.level_labels.push_back(format_double(v));
  cov.codes.reserve(values.size());
  for (double v : values) {
    cov.codes.push_back(static_cast<LevelCode>(std::lower_bound(levels.begin(), levels.end(), v) - levels.begin()));
  }
  return cov;
}

Covariate categorical_covariate(std::string name, const std::vector<std::string>& cells,
                                std::span<const std::size_t> rows, std::size_t cap) {
  std::vector<std::string> labels;
  labels.reserve(rows.size());
  for (const auto r : rows) labels.push_back(trim(cells[r]));
  std::vector<std::string> levels = labels;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.size() > cap) {
    throw DataError("categorical covariate '" + name + "' has " + std::to_string(levels.size()) +
                    " levels, above the cap of " + std::to_string(cap) +
                    "; collapse rare classes or raise category_cap");
  }
  Covariate cov;
  cov.name = std::move(name);
  cov.kind = CovariateKind::kCategorical;
  cov.level_labels = levels;
  cov.codes.reserve(labels.size());
  for (const auto& l : labels) {
    cov.codes.push_back(static_cast<LevelCode>(std::lower_bound(levels.begin(), levels.end(), l) - levels.begin()));
  }
  return cov;
}

bool all_numeric(const std::vector<std::string>& cells, std::span<const std::size_t> rows) {
  return std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return parse_number(cells[r]).has_value(); });
}

// Type-7 sample quantile of sorted data.
double sorted_quantile(std::span<const double> sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

LevelCode bin_of(double x, std::span<const double> edges) {
  // edges has k+1 entries; the top bin is closed.
  const std::size_t k = edges.size() - 1;
  const auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, x);
  const auto code = static_cast<std::size_t>(it - (edges.begin() + 1));
  return static_cast<LevelCode>(std::min(code, k - 1));
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::vector<double> response, std::vector<std::uint8_t> treatment,
                 std::vector<Covariate> covariates)
    : Dataset(std::make_shared<const std::vector<double>>(std::move(response)),
              std::make_shared<const std::vector<std::uint8_t>>(std::move(treatment)),
              std::make_shared<const std::vector<Covariate>>(std::move(covariates))) {}

Dataset::Dataset(std::shared_ptr<const std::vector<double>> response,
                 std::shared_ptr<const std::vector<std::uint8_t>> treatment,
                 std::shared_ptr<const std::vector<Covariate>> covariates)
    : response_(std::move(response)), treatment_(std::move(treatment)), covariates_(std::move(covariates)) {
  treated_ = validate();
}

std::size_t Dataset::validate() const {
  const std::size_t n = response_->size();
  if (treatment_->size() != n) {
    throw DataError("treatment has " + std::to_string(treatment_->size()) + " entries, response has " +
                    std::to_string(n));
  }
  std::size_t treated = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = (*treatment_)[i];
    if (w > 1) throw DataError("treatment entry " + std::to_string(i) + " is not 0 or 1");
    treated += w;
  }
  if (treated == 0 || treated == n) {
    throw DegenerateError(treated == 0 ? "treated arm is empty" : "control arm is empty");
  }

  std::set<std::string_view> names;
  for (const auto& cov : *covariates_) {
    if (!names.insert(cov.name).second) throw DataError("duplicate covariate name '" + cov.name + "'");
    if (cov.codes.size() != n) {
      throw DataError("covariate '" + cov.name + "' has " + std::to_string(cov.codes.size()) +
                      " entries, expected " + std::to_string(n));
    }
    const auto k = cov.level_count();
    for (std::size_t i = 0; i < n; ++i) {
      if (cov.codes[i] >= k) {
        throw DataError("covariate '" + cov.name + "' entry " + std::to_string(i) + " has level code " +
                        std::to_string(cov.codes[i]) + " outside 0.." + std::to_string(k) + "-1");
      }
    }
    if (!cov.bin_edges.empty()) {
      if (cov.bin_edges.size() != k + 1 || !std::is_sorted(cov.bin_edges.begin(), cov.bin_edges.end())) {
        throw DataError("covariate '" + cov.name + "' has inconsistent bin edges");
      }
    }
  }
  return treated;
}

std::optional<std::size_t> Dataset::covariate_index(std::string_view name) const {
  for (std::size_t i = 0; i < covariates_->size(); ++i) {
    if ((*covariates_)[i].name == name) return i;
  }
  return std::nullopt;
}

Dataset Dataset::with_treatment(std::vector<std::uint8_t> treatment) const {
  return Dataset(response_, std::make_shared<const std::vector<std::uint8_t>>(std::move(treatment)), covariates_);
}

Dataset Dataset::with_response(std::vector<double> response) const {
  if (response.size() != size()) throw DataError("replacement response has the wrong length");
  return Dataset(std::make_shared<const std::vector<double>>(std::move(response)), treatment_, covariates_);
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<double> y;
  std::vector<std::uint8_t> w;
  y.reserve(rows.size());
  w.reserve(rows.size());
  for (auto r : rows) {
    y.push_back((*response_)[r]);
    w.push_back((*treatment_)[r]);
  }
  std::vector<Covariate> covs;
  covs.reserve(covariates_->size());
  for (const auto& c : *covariates_) {
    Covariate sub;
    sub.name = c.name;
    sub.kind = c.kind;
    sub.level_labels = c.level_labels;
    sub.bin_edges = c.bin_edges;
    sub.codes.reserve(rows.size());
    for (auto r : rows) sub.codes.push_back(c.codes[r]);
    covs.push_back(std::move(sub));
  }
  return Dataset(std::move(y), std::move(w), std::move(covs));
}

// ---------------------------------------------------------------------------
// Binning and interactions

Covariate bin_numeric(std::string name, std::span<const double> values, const BinningSpec& spec) {
  if (spec.bin_count < 2) throw ConfigError("bin_count must be at least 2 (covariate '" + name + "')");
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("covariate '" + name + "' contains a non-finite value");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty() || sorted.front() == sorted.back()) {
    throw DegenerateError("covariate '" + name + "' has fewer than two distinct values; drop it from the schema");
  }
  const double lo = sorted.front();
  const double hi = sorted.back();

  std::vector<double> edges;
  if (spec.strategy == BinStrategy::kEqualWidth) {
    const double width = (hi - lo) / spec.bin_count;
    for (int i = 0; i < spec.bin_count; ++i) edges.push_back(lo + i * width);
    edges.push_back(hi);
  } else {
    std::vector<double> cuts;
    for (int j = 1; j < spec.bin_count; ++j) {
      const double q = sorted_quantile(sorted, static_cast<double>(j) / spec.bin_count);
      if (q > lo && (cuts.empty() || q > cuts.back())) cuts.push_back(q);
    }
    // Drop cuts that open an empty bin so every level is observed.
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t j = 0; j < cuts.size(); ++j) {
        const double upper = j + 1 < cuts.size() ? cuts[j + 1] : std::nextafter(hi, INFINITY);
        const auto first = std::lower_bound(sorted.begin(), sorted.end(), cuts[j]);
        if (first == sorted.end() || *first >= upper) {
          cuts.erase(cuts.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
          break;
        }
      }
    }
    edges.push_back(lo);
    edges.insert(edges.end(), cuts.begin(), cuts.end());
    edges.push_back(hi);
  }

  Covariate cov;
  cov.name = std::move(name);
  cov.kind = CovariateKind::kOrdered;
  cov.bin_edges = edges;
  const std::size_t k = edges.size() - 1;
  for (std::size_t i = 0; i < k; ++i) cov.level_labels.push_back("bin" + std::to_string(i));
  cov.codes.reserve(values.size());
  for (double v : values) cov.codes.push_back(bin_of(v, edges));
  return cov;
}

Covariate make_interaction(const Covariate& a, const Covariate& b, std::size_t category_cap) {
  if (a.codes.size() != b.codes.size()) {
    throw DataError("cannot cross '" + a.name + "' and '" + b.name + "': different lengths");
  }
  std::map<std::pair<LevelCode, LevelCode>, LevelCode> cells;
  for (std::size_t i = 0; i < a.codes.size(); ++i) cells.emplace(std::make_pair(a.codes[i], b.codes[i]), 0);
  if (cells.size() > category_cap) {
    throw DataError("interaction '" + a.name + "×" + b.name + "' has " + std::to_string(cells.size()) +
                    " observed levels, above the cap of " + std::to_string(category_cap) +
                    " (subset enumeration grows as 2^(k-1))");
  }
  Covariate cov;
  cov.name = a.name + "×" + b.name;
  cov.kind = CovariateKind::kCategorical;
  LevelCode next = 0;
  for (auto& [key, code] : cells) {
    code = next++;
    cov.level_labels.push_back(a.level_labels.at(key.first) + "×" + b.level_labels.at(key.second));
  }
  cov.codes.reserve(a.codes.size());
  for (std::size_t i = 0; i < a.codes.size(); ++i) cov.codes.push_back(cells.at({a.codes[i], b.codes[i]}));
  return cov;
}

// ---------------------------------------------------------------------------
// Loading

LoadedData build_dataset(const RawTable& table, const Schema& schema) {
  if (schema.response.empty() || schema.treatment.empty()) {
    throw ConfigError("schema must name a response and a treatment column");
  }
  if (schema.covariates.empty() && schema.interactions.empty()) {
    throw ConfigError("schema must name at least one covariate");
  }
  {
    std::set<std::string> seen;
    for (const auto& c : schema.covariates) {
      if (!seen.insert(c.name).second) throw DataError("duplicate covariate name '" + c.name + "' in schema");
    }
  }
  std::set<std::string> header_seen;
  for (const auto& h : table.headers) {
    if (!header_seen.insert(h).second) throw DataError("duplicate column header '" + h + "'");
  }

  auto column = [&](const std::string& name) -> std::size_t {
    auto idx = table.column_index(name);
    if (!idx) throw ConfigError("column '" + name + "' named in the schema is not in the input");
    return *idx;
  };

  // Used columns in schema order, each once.
  std::vector<std::string> used{schema.response, schema.treatment};
  auto use = [&](const std::string& n) {
    if (std::find(used.begin(), used.end(), n) == used.end()) used.push_back(n);
  };
  for (const auto& c : schema.covariates) use(c.name);
  for (const auto& x : schema.interactions) {
    use(x.a);
    use(x.b);
  }

  LoadSummary summary;
  summary.rows_read = table.row_count();
  std::vector<bool> drop(summary.rows_read, false);
  for (const auto& name : used) {
    const auto& cells = table.columns[column(name)];
    std::size_t missing = 0;
    for (std::size_t r = 0; r < cells.size(); ++r) {
      if (is_missing_cell(cells[r])) {
        drop[r] = true;
        ++missing;
      }
    }
    if (missing) summary.missing_by_column.emplace_back(name, missing);
  }
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < drop.size(); ++r) {
    if (!drop[r]) rows.push_back(r);
  }
  summary.rows_used = rows.size();
  summary.rows_dropped = summary.rows_read - rows.size();
  if (rows.empty()) throw DegenerateError("no complete rows remain after dropping rows with missing values");

  auto response = numeric_column(table.columns[column(schema.response)], rows, schema.response);

  std::vector<std::uint8_t> treatment;
  treatment.reserve(rows.size());
  {
    const auto& cells = table.columns[column(schema.treatment)];
    for (auto r : rows) {
      auto v = parse_number(cells[r]);
      if (!v || (*v != 0.0 && *v != 1.0)) {
        throw DataError(row_context(r, schema.treatment) + ": treatment value '" + cells[r] +
                        "' is not 0 or 1");
      }
      treatment.push_back(static_cast<std::uint8_t>(*v));
    }
  }
  {
    const auto t = std::count(treatment.begin(), treatment.end(), 1);
    if (t == 0 || t == static_cast<std::ptrdiff_t>(treatment.size())) {
      throw DegenerateError(std::string(t == 0 ? "treated" : "control") + " arm is empty in column '" +
                            schema.treatment + "'");
    }
  }

  auto typed = [&](const std::string& name, ColumnKind kind, const BinningSpec& binning) {
    const auto& cells = table.columns[column(name)];
    switch (kind) {
      case ColumnKind::kNumeric: {
        auto values = numeric_column(cells, rows, name);
        return bin_numeric(name, values, binning);
      }
      case ColumnKind::kOrdinal: {
        auto values = numeric_column(cells, rows, name);
        return ordinal_covariate(name, values);
      }
      case ColumnKind::kCategorical:
        return categorical_covariate(name, cells, rows, schema.category_cap);
    }
    throw ConfigError("unknown column kind");
  };

  std::vector<Covariate> covariates;
  for (const auto& c : schema.covariates) {
    covariates.push_back(typed(c.name, c.kind, c.binning.value_or(schema.binning)));
  }
  for (const auto& x : schema.interactions) {
    auto source = [&](const std::string& name) {
      const auto it = std::find_if(schema.covariates.begin(), schema.covariates.end(),
                                   [&](const CovariateSchema& c) { return c.name == name; });
      ColumnKind kind = ColumnKind::kCategorical;
      BinningSpec binning = schema.binning;
      if (it != schema.covariates.end()) {
        kind = it->kind;
        if (it->binning) binning = *it->binning;
      } else if (all_numeric(table.columns[column(name)], rows)) {
        kind = ColumnKind::kNumeric;
      }
      // An explicit interaction binning also coarsens ordinal sources.
      if (x.binning) {
        binning = *x.binning;
        if (kind == ColumnKind::kOrdinal) kind = ColumnKind::kNumeric;
      }
      return typed(name, kind, binning);
    };
    covariates.push_back(make_interaction(source(x.a), source(x.b), schema.category_cap));
  }

  return LoadedData{Dataset(std::move(response), std::move(treatment), std::move(covariates)), summary};
}

LoadedData load_dataset(const std::filesystem::path& path, const Schema& schema) {
  const auto table = read_delimited(path, schema.delimiter);
  try {
    return build_dataset(table, schema);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Typed round trip

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  RawTable table;
  std::vector<std::string> y, w;
  for (double v : data.response()) y.push_back(format_double(v));
  for (auto v : data.treatment()) w.push_back(std::to_string(v));
  table.add_column("response", std::move(y));
  table.add_column("treatment", std::move(w));
  nlohmann::json sidecar;
  sidecar["format"] = "rstump-coded-dataset";
  sidecar["version"] = 1;
  sidecar["covariates"] = nlohmann::json::array();
  for (const auto& cov : data.covariates()) {
    std::vector<std::string> codes;
    codes.reserve(cov.codes.size());
    for (auto c : cov.codes) codes.push_back(std::to_string(c));
    table.add_column(cov.name, std::move(codes));
    nlohmann::json entry{{"name", cov.name},
                         {"kind", std::string(to_string(cov.kind))},
                         {"labels", cov.level_labels}};
    if (!cov.bin_edges.empty()) entry["bin_edges"] = cov.bin_edges;
    sidecar["covariates"].push_back(std::move(entry));
  }
  write_delimited(table, path, ',');
  auto sidecar_path = path;
  sidecar_path += ".schema.json";
  write_file_atomic(sidecar_path, sidecar.dump(2) + "\n");
}

Dataset load_coded_dataset(const std::filesystem::path& path) {
  auto sidecar_path = path;
  sidecar_path += ".schema.json";
  std::ifstream in(sidecar_path);
  if (!in) throw IoError("cannot open '" + sidecar_path.string() + "'");
  nlohmann::json sidecar;
  try {
    sidecar = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(sidecar_path.string() + ": " + e.what());
  }
  const auto table = read_delimited(path, ',');
  const auto& specs = sidecar.at("covariates");
  if (table.columns.size() != specs.size() + 2) {
    throw DataError(path.string() + ": column count does not match its schema sidecar");
  }
  std::vector<std::size_t> all(table.row_count());
  std::iota(all.begin(), all.end(), 0);
  auto response = numeric_column(table.columns[0], all, table.headers[0]);
  std::vector<std::uint8_t> treatment;
  for (auto v : numeric_column(table.columns[1], all, table.headers[1])) {
    if (v != 0.0 && v != 1.0) throw DataError(path.string() + ": treatment value is not 0 or 1");
    treatment.push_back(static_cast<std::uint8_t>(v));
  }
  std::vector<Covariate> covs;
  for (std::size_t c = 0; c < specs.size(); ++c) {
    Covariate cov;
    cov.name = specs[c].at("name").get<std::string>();
    const auto kind = specs[c].at("kind").get<std::string>();
    if (kind == "ordered") {
      cov.kind = CovariateKind::kOrdered;
    } else if (kind == "categorical") {
      cov.kind = CovariateKind::kCategorical;
    } else {
      throw DataError(sidecar_path.string() + ": unknown covariate kind '" + kind + "'");
    }
    cov.level_labels = specs[c].at("labels").get<std::vector<std::string>>();
    if (specs[c].contains("bin_edges")) cov.bin_edges = specs[c]["bin_edges"].get<std::vector<double>>();
    for (double v : numeric_column(table.columns[c + 2], all, table.headers[c + 2])) {
      cov.codes.push_back(static_cast<LevelCode>(v));
    }
    covs.push_back(std::move(cov));
  }
  return Dataset(std::move(response), std::move(treatment), std::move(covs));
}

std::string_view to_string(CovariateKind kind) {
  return kind == CovariateKind::kOrdered ? "ordered" : "categorical";
}

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kNumeric: return "numeric";
    case ColumnKind::kOrdinal: return "ordinal";
    case ColumnKind::kCategorical: return "categorical";
  }
  return "?";
}

std::string_view to_string(BinStrategy strategy) {
  return strategy == BinStrategy::kEqualWidth ? "equal_width" : "quantile";
}

}  // namespace rstump
