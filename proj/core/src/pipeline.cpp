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

#include "rstump/pipeline.hpp"

#include <algorithm>
#include <filesystem>

#include "rstump/error.hpp"
#include "rstump/report.hpp"
#include "rstump/splits.hpp"
#include "rstump/synthetic.hpp"
#include "rstump/table.hpp"

namespace rstump {
namespace {

using nlohmann::json;

constexpr const char* kNaiveLabel =
    "naive one-tailed normal p-value; ignores the search over splits and sizes, not valid after selection";
constexpr const char* kPooling = "one extreme t per permutation over every admissible (split, child) pair of every size";

[[noreturn]] void rethrow_in(const char* stage, const Error& e) {
  const std::string what = std::string(stage) + ": " + e.what();
  if (dynamic_cast<const EmptyUniverseError*>(&e)) throw EmptyUniverseError(what);
  switch (e.kind()) {
    case ErrorKind::kConfig: throw ConfigError(what);
    case ErrorKind::kData: throw DataError(what);
    case ErrorKind::kDegenerate: throw DegenerateError(what);
    case ErrorKind::kIo: throw IoError(what);
  }
  throw Error(e.kind(), what);
}

template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    rethrow_in(stage, e);
  }
}

json covariate_summary(const Dataset& data) {
  json out = json::array();
  for (const auto& c : data.covariates()) {
    out.push_back(json{{"name", c.name}, {"kind", std::string(to_string(c.kind))}, {"levels", c.level_count()}});
  }
  return out;
}

json config_echo(const RunConfig& config) {
  auto j = to_json(config);
  j.erase("output_dir");  // where results go has no bearing on them
  return j;
}

json objective_json(const ObjectiveOutcome& o, const RunConfig& config, const std::string& histogram,
                    const NullSummary& null_summary) {
  json tuning = json::array();
  for (const auto& slot : o.tuned) {
    json fits = json::array();
    for (const auto& fit : slot.fits) {
      auto fj = to_json(fit);
      fj["righteous_p"] = fit.effect.t ? json_number(righteous_p(*fit.effect.t, o.null, config.alpha).p_value)
                                       : json(nullptr);
      fits.push_back(std::move(fj));
    }
    tuning.push_back(json{{"min_node_size", slot.min_node_size}, {"fits", fits}, {"note", slot.note}});
  }
  json j{{"direction", std::string(to_string(o.direction))},
         {"tuning", tuning},
         {"selected", o.selected() ? to_json(*o.selected()) : json(nullptr)},
         {"righteous", o.righteous ? to_json(*o.righteous) : json(nullptr)},
         {"naive", json{{"p_value", json_number(o.naive_p)}, {"label", kNaiveLabel}}},
         {"note", o.note}};
  j["null"] = json{{"file", histogram},
                   {"summary_file", histogram.empty() ? std::string() : "null_" + std::string(to_string(o.direction)) +
                                                                            ".summary.json"},
                   {"permutations", o.null.values.size()},
                   {"seed", o.null.seed},
                   {"sizes", o.null.sizes},
                   {"pooling", kPooling},
                   {"centering", o.null.centering == Centering::kZero ? "zero" : "permuted-data global ATE"},
                   {"summary", to_json(null_summary)}};
  if (o.honest) {
    const auto& h = *o.honest;
    json hj{{"fraction", h.split.fraction},
            {"train_n", h.split.train.size()},
            {"test_n", h.split.test.size()},
            {"centering", std::string(to_string(config.honest_centering))},
            {"note", h.note}};
    if (h.chosen) {
      hj["min_node_size"] = h.tuned[*h.chosen].min_node_size;
      hj["train_fit"] = to_json(h.tuned[*h.chosen].fits.front());
    }
    hj["result"] = h.result ? to_json(*h.result) : json(nullptr);
    j["honest"] = std::move(hj);
  } else {
    j["honest"] = nullptr;
  }
  return j;
}

}  // namespace

std::string_view version() { return RSTUMP_VERSION; }

AnalysisOutcome analyze(const Dataset& data, const LoadSummary& summary, const RunConfig& config,
                        const RunOptions& options, std::vector<std::string> warnings) {
  validate_config(config);
  AnalysisOutcome out;
  out.summary = summary;
  out.warnings = std::move(warnings);
  out.global = in_stage("global effect", [&] { return global_ate(data); });

  SearchOptions search{config.centering, config.criterion, options.workers};
  for (auto direction : config.objectives) {
    ObjectiveOutcome o;
    o.direction = direction;
    o.tuned = in_stage("search", [&] { return tune(data, direction, config.min_node_sizes, config.depth, search); });
    o.chosen = extreme_slot(o.tuned, direction);
    if (!o.chosen) o.note = "no size admits a usable split";
    out.objectives.push_back(std::move(o));
  }

  const NullOptions null_options{options.workers, config.centering};
  auto nulls = in_stage("permutation null", [&] {
    return build_nulls(data, config.min_node_sizes, config.permutations, config.seed, null_options);
  });
  for (auto& o : out.objectives) {
    o.null = o.direction == Direction::kMaxAte ? nulls.max : nulls.min;
    if (const auto* fit = o.selected()) {
      if (fit->effect.t) {
        o.righteous = righteous_p(*fit->effect.t, o.null, config.alpha);
        o.naive_p = naive_p(*fit->effect.t, o.direction);
      } else {
        o.note = "selected node has zero standard error; its t-value and p-values are undefined";
      }
    }
    if (config.honest_fraction) {
      try {
        o.honest = honest_analysis(data, o.direction, config.min_node_sizes, *config.honest_fraction, config.seed,
                                   config.honest_centering, search);
      } catch (const DegenerateError& e) {
        HonestAnalysis failed;
        failed.split.fraction = *config.honest_fraction;
        failed.split.seed = config.seed;
        failed.note = e.what();
        o.honest = std::move(failed);
      }
    }
  }

  if (options.write_files) {
    in_stage("output", [&] {
      std::error_code ec;
      std::filesystem::create_directories(config.output_dir, ec);
      if (ec) throw IoError("cannot create output directory '" + config.output_dir.string() + "': " + ec.message());
    });
  }

  json objectives = json::array();
  for (const auto& o : out.objectives) {
    std::string histogram;
    if (options.write_files) {
      const auto files = in_stage("output", [&] { return emit_histogram(o.null, config.alpha, config.output_dir); });
      histogram = files.values.filename().string();
    }
    objectives.push_back(objective_json(o, config, histogram, summarize_null(o.null, config.alpha)));
  }

  json global = to_json(out.global);
  out.report = json{{"schema_version", kReportSchemaVersion},
                    {"software", json{{"name", "rstump"}, {"version", std::string(version())}}},
                    {"generated_at", options.timestamp.value_or(utc_timestamp())},
                    {"config", config_echo(config)},
                    {"data",
                     json{{"source", config.input ? "file" : "generator"},
                          {"load", to_json(summary)},
                          {"n", data.size()},
                          {"treated", data.treated_count()},
                          {"control", data.control_count()},
                          {"covariates", covariate_summary(data)}}},
                    {"global", global},
                    {"objectives", objectives},
                    {"warnings", out.warnings}};

  if (options.write_files) {
    out.report_path = config.output_dir / "report.json";
    in_stage("output", [&] { write_file_atomic(out.report_path, dump_report(out.report)); });
  }
  return out;
}

PreparedData prepare_data(const RunConfig& config) {
  validate_config(config);
  if (config.input) {
    auto loaded = in_stage("load", [&] { return load_dataset(config.input->path, config.effective_schema()); });
    std::vector<std::string> warnings;
    if (loaded.summary.rows_dropped > 0) {
      warnings.push_back(std::to_string(loaded.summary.rows_dropped) + " rows with missing values were dropped");
    }
    return PreparedData{std::move(loaded.data), loaded.summary, std::move(warnings), std::nullopt, std::nullopt};
  }
  auto gen = in_stage("generate", [&] { return generate(*config.generator, config.seed); });
  auto schema = gen.schema;
  schema.binning = config.binning;
  schema.interactions = config.interactions;
  schema.category_cap = config.category_cap;
  auto loaded = in_stage("load", [&] { return build_dataset(gen.table, schema); });
  return PreparedData{std::move(loaded.data), loaded.summary, std::move(gen.warnings), std::move(gen.truth),
                      std::move(gen.table)};
}

AnalysisOutcome run(const RunConfig& config, const RunOptions& options) {
  auto prepared = prepare_data(config);
  return analyze(prepared.data, prepared.summary, config, options, std::move(prepared.warnings));
}

AnalysisOutcome simulate(const RunConfig& config, const RunOptions& options) {
  if (!config.generator) throw ConfigError("simulate needs a 'generator' section in the config");
  auto prepared = prepare_data(config);
  if (options.write_files) {
    in_stage("output", [&] {
      std::error_code ec;
      std::filesystem::create_directories(config.output_dir, ec);
      if (ec) throw IoError("cannot create output directory '" + config.output_dir.string() + "': " + ec.message());
      write_delimited(*prepared.raw, config.output_dir / "simulated.csv");
      write_delimited(truth_table(*prepared.truth, prepared.data.treatment()), config.output_dir / "truth.csv");
    });
  }
  return analyze(prepared.data, prepared.summary, config, options, std::move(prepared.warnings));
}

json validate(const RunConfig& config) {
  auto prepared = prepare_data(config);
  const auto& data = prepared.data;
  json universe = json::array();
  bool any = false;
  for (auto size : config.min_node_sizes) {
    const auto u = enumerate_splits_or_empty(data, size);
    any = any || !u.splits.empty();
    universe.push_back(json{{"min_node_size", size}, {"splits", u.splits.size()}});
  }
  if (!any) throw EmptyUniverseError("validate: no partition satisfies the size constraint for any tuning size");
  const auto global = global_ate(data);
  return json{{"ok", true},
              {"config", config_echo(config)},
              {"load", to_json(prepared.summary)},
              {"n", data.size()},
              {"treated", data.treated_count()},
              {"control", data.control_count()},
              {"global", to_json(global)},
              {"covariates", covariate_summary(data)},
              {"universe", universe},
              {"warnings", prepared.warnings}};
}

}  // namespace rstump
