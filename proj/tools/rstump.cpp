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

// rstump: subgroup search for extreme local treatment effects with
// permutation (max-t) and train/test inference.
//
//   rstump analyze  <config.json> [--seed N] [-B N] [-o DIR] [--workers N]
//   rstump simulate <config.json> [...]   generator config; also writes the data
//   rstump validate <config.json>         dry run
//
// Exit codes: 0 ok, 2 config error, 3 degenerate data, 1 anything else.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rstump/config.hpp"
#include "rstump/error.hpp"
#include "rstump/pipeline.hpp"
#include "rstump/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> permutations;
  std::optional<std::string> output;
  std::size_t workers = 0;
  bool quiet = false;
};

rstump::RunConfig load(const std::string& path, const Overrides& o) {
  auto config = rstump::load_config(path);
  if (o.seed) config.seed = *o.seed;
  if (o.permutations) config.permutations = *o.permutations;
  if (o.output) config.output_dir = *o.output;
  rstump::validate_config(config);
  return config;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("undefined"); }

void print_summary(const rstump::AnalysisOutcome& out) {
  std::cout << "global ATE " << fmt(out.global.ate) << " (se " << fmt(out.global.se) << ", n_t " << out.global.n_t
            << ", n_c " << out.global.n_c << ")\n";
  for (const auto& o : out.objectives) {
    std::cout << "\n[" << rstump::to_string(o.direction) << "]\n";
    const auto* fit = o.selected();
    if (!fit) {
      std::cout << "  no selection: " << o.note << "\n";
      continue;
    }
    std::cout << "  node          " << fit->rule << "  (n = " << fit->selected_n << ", min size "
              << fit->min_node_size << ")\n"
              << "  centered ATE  " << fmt(fit->effect.centered) << "  t = " << fmt(fit->effect.t) << "\n"
              << "  naive p       " << fmt(o.naive_p) << "  (ignores the search)\n";
    if (o.righteous) {
      std::cout << "  righteous p   " << fmt(o.righteous->p_value) << "  critical t " << fmt(o.righteous->critical_value)
                << (o.righteous->reject ? "  reject\n" : "  do not reject\n");
    }
    if (o.honest) {
      if (o.honest->result && o.honest->result->estimable()) {
        const auto& h = *o.honest->result;
        std::cout << "  honest        " << h.node_rule << "  centered " << fmt(h.effect->centered) << "  p(1-sided) "
                  << fmt(h.p_one_sided) << "  p(2-sided) " << fmt(h.p_two_sided) << "\n";
      } else {
        const auto& note = o.honest->result ? o.honest->result->note : o.honest->note;
        std::cout << "  honest        " << note << "\n";
      }
    }
  }
  for (const auto& w : out.warnings) std::cout << "warning: " << w << "\n";
  if (!out.report_path.empty()) std::cout << "\nreport: " << out.report_path.string() << "\n";
}

int exit_code(const rstump::Error& e) {
  switch (e.kind()) {
    case rstump::ErrorKind::kConfig: return kExitConfig;
    case rstump::ErrorKind::kDegenerate: return kExitDegenerate;
    default: return kExitOther;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search randomized-trial data for subgroups with extreme local treatment effects"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rstump::version()));

  Overrides overrides;
  std::string config_path;
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", overrides.seed, "Override the config seed");
    cmd->add_option("-B,--permutations", overrides.permutations, "Override the number of permutations");
    cmd->add_option("-o,--output", overrides.output, "Override the output directory");
    cmd->add_option("--workers", overrides.workers, "Worker threads (0 = all cores); results do not depend on it");
    cmd->add_flag("-q,--quiet", overrides.quiet, "Print nothing on success");
  };
  auto* analyze = app.add_subcommand("analyze", "Run the search and inference, write report.json");
  add_run_flags(analyze);
  auto* simulate = app.add_subcommand("simulate", "Generate data from the config's generator, then analyze");
  add_run_flags(simulate);
  auto* validate = app.add_subcommand("validate", "Check the config and data without searching");
  validate->add_option("config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (validate->parsed()) {
      const auto config = load(config_path, overrides);
      std::cout << rstump::dump_report(rstump::validate(config));
      return kExitOk;
    }
    const auto config = load(config_path, overrides);
    rstump::RunOptions options;
    options.workers = overrides.workers;
    const auto out = simulate->parsed() ? rstump::simulate(config, options) : rstump::run(config, options);
    if (!overrides.quiet) print_summary(out);
    return kExitOk;
  } catch (const rstump::Error& e) {
    std::cerr << "rstump: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "rstump: " << e.what() << "\n";
    return kExitOther;
  }
}
