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

#include "rstump/report.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>

#include "rstump/error.hpp"
#include "rstump/table.hpp"

namespace rstump {

using nlohmann::json;

json json_number(double value) {
  if (std::isnan(value)) return nullptr;
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

json json_number(const std::optional<double>& value) { return value ? json_number(*value) : json(nullptr); }

json to_json(const EffectEstimate& e) {
  return json{{"ate", json_number(e.ate)},     {"mean_t", json_number(e.mean_t)}, {"mean_c", json_number(e.mean_c)},
              {"n_t", e.n_t},                  {"n_c", e.n_c},                    {"var_t", json_number(e.var_t)},
              {"var_c", json_number(e.var_c)}, {"se", json_number(e.se)}};
}

json to_json(const CenteredEffect& e) {
  json j = to_json(e.local);
  j["global_ate"] = json_number(e.global_ate);
  j["centered_ate"] = json_number(e.centered);
  j["t"] = json_number(e.t);
  j["welch_df"] = json_number(e.welch_df());
  return j;
}

json to_json(const StumpFit& fit) {
  json j{{"rank", fit.rank},
         {"min_node_size", fit.min_node_size},
         {"covariate", fit.split.covariate_name},
         {"rule", fit.rule},
         {"split_rule", fit.split_rule},
         {"selected_child", std::string(to_string(fit.selected))},
         {"n", fit.selected_n},
         {"other_n", fit.other_n},
         {"effect", to_json(fit.effect)},
         {"other_effect", fit.other_effect ? to_json(*fit.other_effect) : json(nullptr)},
         {"dropped_covariates", fit.dropped_covariates}};
  return j;
}

json to_json(const RighteousResult& r) {
  return json{{"observed_t", json_number(r.observed_t)},
              {"p_value", json_number(r.p_value)},
              {"critical_value", json_number(r.critical_value)},
              {"alpha", r.alpha},
              {"exceedances", r.exceedances},
              {"null_size", r.null_size},
              {"reject", r.reject}};
}

json to_json(const HonestResult& r) {
  return json{{"rule", r.node_rule},
              {"selected_child", std::string(to_string(r.selected))},
              {"test_n_t", r.test_n_t},
              {"test_n_c", r.test_n_c},
              {"center", json_number(r.center)},
              {"effect", r.effect ? to_json(*r.effect) : json(nullptr)},
              {"df", json_number(r.df)},
              {"p_two_sided", json_number(r.p_two_sided)},
              {"p_one_sided", json_number(r.p_one_sided)},
              {"note", r.note}};
}

json to_json(const LoadSummary& s) {
  json missing = json::object();
  for (const auto& [name, count] : s.missing_by_column) missing[name] = count;
  return json{{"rows_read", s.rows_read},
              {"rows_dropped", s.rows_dropped},
              {"rows_used", s.rows_used},
              {"missing_by_column", missing}};
}

NullSummary summarize_null(const NullDistribution& null, double alpha) {
  if (null.values.empty()) throw ConfigError("cannot summarize an empty null distribution");
  NullSummary s;
  s.min = *std::min_element(null.values.begin(), null.values.end());
  s.max = *std::max_element(null.values.begin(), null.values.end());
  for (int k = 1; k <= 5; ++k) s.quantiles.push_back(empirical_quantile(null.values, k / 6.0));
  s.alpha = alpha;
  // The critical value does not depend on the observed statistic.
  s.critical_value = righteous_p(0.0, null, alpha).critical_value;
  return s;
}

json to_json(const NullSummary& s) {
  json q = json::array();
  for (double v : s.quantiles) q.push_back(json_number(v));
  return json{{"min", json_number(s.min)},
              {"quantiles", q},
              {"quantile_levels", json::array({"1/6", "2/6", "3/6", "4/6", "5/6"})},
              {"max", json_number(s.max)},
              {"alpha", s.alpha},
              {"critical_value", json_number(s.critical_value)}};
}

HistogramFiles emit_histogram(const NullDistribution& null, double alpha, const std::filesystem::path& dir) {
  const std::string stem = std::string("null_") + std::string(to_string(null.direction));
  HistogramFiles files{dir / (stem + ".tsv"), dir / (stem + ".summary.json")};
  std::string text = "permutation\t" + stem.substr(5) + "_t\n";
  for (std::size_t b = 0; b < null.values.size(); ++b) {
    text += std::to_string(b);
    text += '\t';
    text += format_double(null.values[b]);
    text += '\n';
  }
  write_file_atomic(files.values, text);
  json summary = to_json(summarize_null(null, alpha));
  summary["direction"] = std::string(to_string(null.direction));
  summary["permutations"] = null.values.size();
  summary["exact"] = null.exact;
  write_file_atomic(files.summary, dump_report(summary));
  return files;
}

std::vector<double> read_histogram(const std::filesystem::path& path) {
  const auto table = read_delimited(path, '\t');
  if (table.headers.size() != 2) {
    throw DataError("histogram file '" + path.string() + "' must have exactly two columns");
  }
  std::vector<double> values;
  values.reserve(table.row_count());
  for (const auto& cell : table.columns[1]) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
      throw DataError("histogram file '" + path.string() + "': '" + cell + "' is not a number");
    }
    values.push_back(v);
  }
  return values;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

}  // namespace rstump
