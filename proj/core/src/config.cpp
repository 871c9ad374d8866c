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

#include "rstump/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string_view>

#include "rstump/error.hpp"

namespace rstump {
namespace {

using nlohmann::json;

void allow_keys(const json& j, std::initializer_list<std::string_view> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + " must be a string");
  return j.get<std::string>();
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + " must be a number");
  return j.get<double>();
}

std::uint64_t get_count(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ConfigError(where + " must be a non-negative integer");
}

const json& get_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array");
  return j;
}

std::string required_string(const json& j, const char* key, const std::string& where) {
  const auto* v = find(j, key);
  if (!v) throw ConfigError(where + " needs '" + key + "'");
  return get_string(*v, where + "." + key);
}

BinningSpec parse_binning(const json& j, const std::string& where) {
  allow_keys(j, {"strategy", "bins"}, where);
  BinningSpec b;
  if (const auto* s = find(j, "strategy")) {
    const auto v = get_string(*s, where + ".strategy");
    if (v == "equal_width") {
      b.strategy = BinStrategy::kEqualWidth;
    } else if (v == "quantile") {
      b.strategy = BinStrategy::kQuantile;
    } else {
      throw ConfigError(where + ".strategy must be \"equal_width\" or \"quantile\", got \"" + v + "\"");
    }
  }
  if (const auto* k = find(j, "bins")) {
    const auto bins = get_count(*k, where + ".bins");
    if (bins < 2 || bins > 1000) throw ConfigError(where + ".bins must lie in 2..1000");
    b.bin_count = static_cast<int>(bins);
  }
  return b;
}

ColumnKind parse_column_kind(const std::string& v, const std::string& where) {
  if (v == "numeric") return ColumnKind::kNumeric;
  if (v == "ordinal") return ColumnKind::kOrdinal;
  if (v == "categorical") return ColumnKind::kCategorical;
  throw ConfigError(where + " must be \"numeric\", \"ordinal\" or \"categorical\", got \"" + v + "\"");
}

char parse_delimiter(const json& j, const std::string& where) {
  const auto v = get_string(j, where);
  if (v == "tab" || v == "\t") return '\t';
  if (v == "auto") return '\0';
  if (v.size() != 1) throw ConfigError(where + " must be a single character, \"tab\" or \"auto\"");
  return v[0];
}

InputConfig parse_input(const json& j, const std::filesystem::path& base_dir) {
  allow_keys(j, {"path", "delimiter", "response", "treatment", "covariates"}, "input");
  InputConfig in;
  in.path = required_string(j, "path", "input");
  if (in.path.is_relative() && !base_dir.empty()) in.path = base_dir / in.path;
  in.path = in.path.lexically_normal();
  in.schema.response = required_string(j, "response", "input");
  in.schema.treatment = required_string(j, "treatment", "input");
  if (const auto* d = find(j, "delimiter")) in.schema.delimiter = parse_delimiter(*d, "input.delimiter");
  const auto* covs = find(j, "covariates");
  if (!covs) throw ConfigError("input needs 'covariates'");
  std::size_t i = 0;
  for (const auto& c : get_array(*covs, "input.covariates")) {
    const auto where = "input.covariates[" + std::to_string(i++) + "]";
    CovariateSchema cs;
    if (c.is_string()) {
      cs.name = c.get<std::string>();
    } else {
      allow_keys(c, {"name", "kind", "binning"}, where);
      cs.name = required_string(c, "name", where);
      if (const auto* k = find(c, "kind")) cs.kind = parse_column_kind(get_string(*k, where + ".kind"), where + ".kind");
      if (const auto* b = find(c, "binning")) cs.binning = parse_binning(*b, where + ".binning");
    }
    in.schema.covariates.push_back(std::move(cs));
  }
  return in;
}

std::vector<InteractionSpec> parse_interactions(const json& j) {
  std::vector<InteractionSpec> out;
  std::size_t i = 0;
  for (const auto& x : get_array(j, "interactions")) {
    const auto where = "interactions[" + std::to_string(i++) + "]";
    allow_keys(x, {"a", "b", "binning"}, where);
    InteractionSpec spec;
    spec.a = required_string(x, "a", where);
    spec.b = required_string(x, "b", where);
    if (const auto* b = find(x, "binning")) spec.binning = parse_binning(*b, where + ".binning");
    out.push_back(std::move(spec));
  }
  return out;
}

ConditionOp parse_op(const std::string& v, const std::string& where) {
  if (v == "<=") return ConditionOp::kLe;
  if (v == "<") return ConditionOp::kLt;
  if (v == ">=") return ConditionOp::kGe;
  if (v == ">") return ConditionOp::kGt;
  if (v == "==") return ConditionOp::kEq;
  if (v == "in") return ConditionOp::kIn;
  throw ConfigError(where + " must be one of <=, <, >=, >, ==, in; got \"" + v + "\"");
}

Condition parse_condition(const json& j, const std::string& where) {
  allow_keys(j, {"covariate", "op", "value", "values"}, where);
  Condition c;
  c.covariate = required_string(j, "covariate", where);
  c.op = parse_op(required_string(j, "op", where), where + ".op");
  auto add = [&](const json& v, const std::string& at) {
    if (v.is_number()) {
      c.numbers.push_back(v.get<double>());
    } else if (v.is_string()) {
      c.labels.push_back(v.get<std::string>());
    } else {
      throw ConfigError(at + " must be a number or a string");
    }
  };
  const auto* one = find(j, "value");
  const auto* many = find(j, "values");
  if ((one != nullptr) == (many != nullptr)) throw ConfigError(where + " needs exactly one of 'value' and 'values'");
  if (one) add(*one, where + ".value");
  if (many) {
    for (const auto& v : get_array(*many, where + ".values")) add(v, where + ".values");
  }
  if (!c.numbers.empty() && !c.labels.empty()) throw ConfigError(where + " mixes numbers and labels");
  return c;
}

std::vector<Subgroup> parse_subgroups(const json& j, const char* shift_key, const std::string& where) {
  std::vector<Subgroup> out;
  std::size_t i = 0;
  for (const auto& g : get_array(j, where)) {
    const auto at = where + "[" + std::to_string(i++) + "]";
    allow_keys(g, {"when", shift_key}, at);
    Subgroup s;
    const auto* when = find(g, "when");
    const auto* shift = find(g, shift_key);
    if (!when || !shift) throw ConfigError(at + " needs 'when' and '" + shift_key + "'");
    std::size_t k = 0;
    for (const auto& c : get_array(*when, at + ".when")) {
      s.when.push_back(parse_condition(c, at + ".when[" + std::to_string(k++) + "]"));
    }
    s.shift = get_number(*shift, at + "." + shift_key);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<double> number_list(const json& j, const std::string& where) {
  std::vector<double> out;
  for (const auto& v : get_array(j, where)) out.push_back(get_number(v, where));
  return out;
}

GeneratedCovariate parse_generated_covariate(const json& j, const std::string& where) {
  GeneratedCovariate c;
  c.name = required_string(j, "name", where);
  const auto kind = required_string(j, "kind", where);
  if (kind == "ordinal") {
    allow_keys(j, {"name", "kind", "levels", "probabilities"}, where);
    c.kind = GeneratedKind::kOrdinal;
    const auto* levels = find(j, "levels");
    if (!levels) throw ConfigError(where + " needs 'levels'");
    if (levels->is_array()) {
      c.values = number_list(*levels, where + ".levels");
    } else {
      const auto k = get_count(*levels, where + ".levels");
      for (std::uint64_t v = 0; v < k; ++v) c.values.push_back(static_cast<double>(v));
    }
  } else if (kind == "categorical") {
    allow_keys(j, {"name", "kind", "labels", "probabilities"}, where);
    c.kind = GeneratedKind::kCategorical;
    const auto* labels = find(j, "labels");
    if (!labels) throw ConfigError(where + " needs 'labels'");
    for (const auto& l : get_array(*labels, where + ".labels")) c.labels.push_back(get_string(l, where + ".labels"));
  } else if (kind == "uniform") {
    allow_keys(j, {"name", "kind", "min", "max", "binning"}, where);
    c.kind = GeneratedKind::kUniform;
    c.a = find(j, "min") ? get_number(j["min"], where + ".min") : 0.0;
    c.b = find(j, "max") ? get_number(j["max"], where + ".max") : 1.0;
  } else if (kind == "normal") {
    allow_keys(j, {"name", "kind", "mean", "sd", "binning"}, where);
    c.kind = GeneratedKind::kNormal;
    c.a = find(j, "mean") ? get_number(j["mean"], where + ".mean") : 0.0;
    c.b = find(j, "sd") ? get_number(j["sd"], where + ".sd") : 1.0;
  } else {
    throw ConfigError(where + ".kind must be ordinal, categorical, uniform or normal; got \"" + kind + "\"");
  }
  if (const auto* p = find(j, "probabilities")) c.probabilities = number_list(*p, where + ".probabilities");
  if (const auto* b = find(j, "binning")) c.binning = parse_binning(*b, where + ".binning");
  return c;
}

ResponseModel parse_response(const json& j) {
  ResponseModel r;
  const auto type = find(j, "type") ? get_string(j["type"], "generator.response.type") : std::string("binary");
  if (type == "binary") {
    allow_keys(j, {"type", "base_rate"}, "generator.response");
    r.binary = true;
    if (const auto* b = find(j, "base_rate")) r.base_rate = get_number(*b, "generator.response.base_rate");
  } else if (type == "numeric") {
    allow_keys(j, {"type", "mean", "noise_sd"}, "generator.response");
    r.binary = false;
    if (const auto* m = find(j, "mean")) r.mean = get_number(*m, "generator.response.mean");
    if (const auto* s = find(j, "noise_sd")) r.noise_sd = get_number(*s, "generator.response.noise_sd");
  } else {
    throw ConfigError("generator.response.type must be \"binary\" or \"numeric\"");
  }
  return r;
}

AssignmentModel parse_assignment(const json& j) {
  AssignmentModel a;
  const auto type = find(j, "type") ? get_string(j["type"], "generator.assignment.type") : std::string("bernoulli");
  if (type == "bernoulli") {
    allow_keys(j, {"type", "probability"}, "generator.assignment");
    if (const auto* p = find(j, "probability")) a.probability = get_number(*p, "generator.assignment.probability");
  } else if (type == "fixed") {
    allow_keys(j, {"type", "treated"}, "generator.assignment");
    a.fixed = true;
    const auto* t = find(j, "treated");
    if (!t) throw ConfigError("generator.assignment needs 'treated' for fixed assignment");
    a.treated = get_count(*t, "generator.assignment.treated");
  } else {
    throw ConfigError("generator.assignment.type must be \"bernoulli\" or \"fixed\"");
  }
  return a;
}

Direction parse_direction(const std::string& v) {
  if (v == "max") return Direction::kMaxAte;
  if (v == "min") return Direction::kMinAte;
  throw ConfigError("objectives entries must be \"max\" or \"min\", got \"" + v + "\"");
}

json condition_json(const Condition& c) {
  json j{{"covariate", c.covariate}, {"op", std::string(to_string(c.op))}};
  json values = json::array();
  for (double v : c.numbers) values.push_back(v);
  for (const auto& l : c.labels) values.push_back(l);
  if (c.op == ConditionOp::kIn) {
    j["values"] = values;
  } else if (!values.empty()) {
    j["value"] = values.front();
  }
  return j;
}

json subgroups_json(const std::vector<Subgroup>& groups, const char* shift_key) {
  json out = json::array();
  for (const auto& g : groups) {
    json when = json::array();
    for (const auto& c : g.when) when.push_back(condition_json(c));
    out.push_back(json{{"when", when}, {shift_key, g.shift}});
  }
  return out;
}

}  // namespace

Schema RunConfig::effective_schema() const {
  Schema s = input ? input->schema : Schema{};
  s.binning = binning;
  s.interactions = interactions;
  s.category_cap = category_cap;
  return s;
}

GeneratorSpec generator_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("generator must be an object");
  GeneratorSpec spec;
  if (const auto* t = find(j, "template")) {
    allow_keys(j, {"template", "n", "tau", "base_rate", "assignment", "drift"}, "generator");
    const auto name = get_string(*t, "generator.template");
    if (name != "probation") throw ConfigError("generator.template must be \"probation\", got \"" + name + "\"");
    const auto n = find(j, "n") ? get_count(j["n"], "generator.n") : 1559;
    const double tau = find(j, "tau") ? get_number(j["tau"], "generator.tau") : 0.165;
    const double base = find(j, "base_rate") ? get_number(j["base_rate"], "generator.base_rate") : 0.18;
    spec = probation_template(static_cast<std::size_t>(n), tau, base);
  } else {
    allow_keys(j, {"n", "covariates", "response", "assignment", "effects", "prognostic", "drift"}, "generator");
    spec.n = static_cast<std::size_t>(find(j, "n") ? get_count(j["n"], "generator.n") : 1000);
    const auto* covs = find(j, "covariates");
    if (!covs) throw ConfigError("generator needs 'covariates'");
    std::size_t i = 0;
    for (const auto& c : get_array(*covs, "generator.covariates")) {
      spec.covariates.push_back(parse_generated_covariate(c, "generator.covariates[" + std::to_string(i++) + "]"));
    }
    if (const auto* r = find(j, "response")) spec.response = parse_response(*r);
    if (const auto* e = find(j, "effects")) spec.effects = parse_subgroups(*e, "tau", "generator.effects");
    if (const auto* p = find(j, "prognostic")) {
      spec.prognostic = parse_subgroups(*p, "shift", "generator.prognostic");
    }
  }
  if (const auto* a = find(j, "assignment")) spec.assignment = parse_assignment(*a);
  if (const auto* d = find(j, "drift")) spec.drift = get_number(*d, "generator.drift");
  validate_spec(spec);
  return spec;
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  allow_keys(doc,
             {"input", "generator", "binning", "interactions", "category_cap", "objectives", "min_node_sizes", "depth",
              "permutations", "alpha", "seed", "honest_fraction", "centering", "honest_centering", "criterion",
              "output_dir"},
             "config");
  RunConfig c;
  if (const auto* in = find(doc, "input")) c.input = parse_input(*in, base_dir);
  if (const auto* g = find(doc, "generator")) {
    c.generator = generator_from_json(*g);
    // Templates carry their own interaction; run-level settings win.
    if (!find(doc, "interactions")) c.interactions = c.generator->interactions;
    c.generator->interactions.clear();
  }
  if (const auto* b = find(doc, "binning")) c.binning = parse_binning(*b, "binning");
  if (const auto* x = find(doc, "interactions")) c.interactions = parse_interactions(*x);
  if (const auto* k = find(doc, "category_cap")) c.category_cap = get_count(*k, "category_cap");
  if (const auto* o = find(doc, "objectives")) {
    c.objectives.clear();
    if (o->is_string()) {
      const auto v = o->get<std::string>();
      if (v == "both") {
        c.objectives = {Direction::kMaxAte, Direction::kMinAte};
      } else {
        c.objectives.push_back(parse_direction(v));
      }
    } else {
      for (const auto& v : get_array(*o, "objectives")) c.objectives.push_back(parse_direction(get_string(v, "objectives")));
    }
  }
  if (const auto* s = find(doc, "min_node_sizes")) {
    c.min_node_sizes.clear();
    for (const auto& v : get_array(*s, "min_node_sizes")) c.min_node_sizes.push_back(get_count(v, "min_node_sizes"));
  }
  if (const auto* d = find(doc, "depth")) c.depth = get_count(*d, "depth");
  if (const auto* b = find(doc, "permutations")) c.permutations = get_count(*b, "permutations");
  if (const auto* a = find(doc, "alpha")) c.alpha = get_number(*a, "alpha");
  if (const auto* s = find(doc, "seed")) c.seed = get_count(*s, "seed");
  if (const auto* h = find(doc, "honest_fraction")) {
    if (!h->is_null()) c.honest_fraction = get_number(*h, "honest_fraction");
  }
  if (const auto* v = find(doc, "centering")) {
    const auto s = get_string(*v, "centering");
    if (s == "global") {
      c.centering = Centering::kEstimatedGlobal;
    } else if (s == "zero") {
      c.centering = Centering::kZero;
    } else {
      throw ConfigError("centering must be \"global\" or \"zero\", got \"" + s + "\"");
    }
  }
  if (const auto* v = find(doc, "honest_centering")) {
    const auto s = get_string(*v, "honest_centering");
    if (s == "test") {
      c.honest_centering = HonestCentering::kTestGlobal;
    } else if (s == "full") {
      c.honest_centering = HonestCentering::kFullGlobal;
    } else if (s == "zero") {
      c.honest_centering = HonestCentering::kZero;
    } else {
      throw ConfigError("honest_centering must be \"test\", \"full\" or \"zero\", got \"" + s + "\"");
    }
  }
  if (const auto* v = find(doc, "criterion")) {
    const auto s = get_string(*v, "criterion");
    if (s == "ate") {
      c.criterion = Criterion::kCenteredAte;
    } else if (s == "mse") {
      c.criterion = Criterion::kDeltaMse;
    } else {
      throw ConfigError("criterion must be \"ate\" or \"mse\", got \"" + s + "\"");
    }
  }
  if (const auto* o = find(doc, "output_dir")) {
    c.output_dir = get_string(*o, "output_dir");
  }
  if (c.output_dir.is_relative() && !base_dir.empty()) c.output_dir = base_dir / c.output_dir;
  validate_config(c);
  return c;
}

void validate_config(const RunConfig& c) {
  if (c.input.has_value() == c.generator.has_value()) {
    throw ConfigError("config needs exactly one of 'input' and 'generator'");
  }
  if (c.objectives.empty()) throw ConfigError("at least one objective is required");
  if (std::set<Direction>(c.objectives.begin(), c.objectives.end()).size() != c.objectives.size()) {
    throw ConfigError("objectives must not repeat");
  }
  if (c.min_node_sizes.empty()) throw ConfigError("min_node_sizes must not be empty");
  for (auto s : c.min_node_sizes) {
    if (s < 1) throw ConfigError("min_node_sizes entries must be at least 1");
  }
  if (std::set<std::size_t>(c.min_node_sizes.begin(), c.min_node_sizes.end()).size() != c.min_node_sizes.size()) {
    throw ConfigError("min_node_sizes must not repeat");
  }
  if (c.depth < 1) throw ConfigError("depth must be at least 1");
  if (c.permutations < 1) throw ConfigError("permutations must be at least 1");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie strictly between 0 and 1");
  if (c.honest_fraction && !(*c.honest_fraction > 0.0 && *c.honest_fraction < 1.0)) {
    throw ConfigError("honest_fraction must lie strictly between 0 and 1");
  }
  if (c.category_cap < 2 || c.category_cap > kMaxSubsetLevels) {
    throw ConfigError("category_cap must lie in 2.." + std::to_string(kMaxSubsetLevels));
  }
  if (c.binning.bin_count < 2) throw ConfigError("binning.bins must be at least 2");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  auto base = std::filesystem::absolute(path).parent_path();
  return parse_config(doc, base);
}

json to_json(const BinningSpec& b) {
  return json{{"strategy", b.strategy == BinStrategy::kQuantile ? "quantile" : "equal_width"}, {"bins", b.bin_count}};
}

json to_json(const GeneratorSpec& spec) {
  json covs = json::array();
  for (const auto& c : spec.covariates) {
    json j{{"name", c.name}, {"kind", std::string(to_string(c.kind))}};
    switch (c.kind) {
      case GeneratedKind::kOrdinal: j["levels"] = c.values; break;
      case GeneratedKind::kCategorical: j["labels"] = c.labels; break;
      case GeneratedKind::kUniform:
        j["min"] = c.a;
        j["max"] = c.b;
        break;
      case GeneratedKind::kNormal:
        j["mean"] = c.a;
        j["sd"] = c.b;
        break;
    }
    if (!c.probabilities.empty()) j["probabilities"] = c.probabilities;
    if (c.binning) j["binning"] = to_json(*c.binning);
    covs.push_back(std::move(j));
  }
  json response = spec.response.binary
                      ? json{{"type", "binary"}, {"base_rate", spec.response.base_rate}}
                      : json{{"type", "numeric"}, {"mean", spec.response.mean}, {"noise_sd", spec.response.noise_sd}};
  json assignment = spec.assignment.fixed ? json{{"type", "fixed"}, {"treated", spec.assignment.treated}}
                                          : json{{"type", "bernoulli"}, {"probability", spec.assignment.probability}};
  return json{{"n", spec.n},
              {"covariates", covs},
              {"response", response},
              {"assignment", assignment},
              {"effects", subgroups_json(spec.effects, "tau")},
              {"prognostic", subgroups_json(spec.prognostic, "shift")},
              {"drift", spec.drift}};
}

json to_json(const RunConfig& c) {
  json j;
  if (c.input) {
    const auto& s = c.input->schema;
    json covs = json::array();
    for (const auto& cs : s.covariates) {
      json cj{{"name", cs.name}, {"kind", std::string(to_string(cs.kind))}};
      if (cs.binning) cj["binning"] = to_json(*cs.binning);
      covs.push_back(std::move(cj));
    }
    j["input"] = json{{"path", c.input->path.generic_string()},
                      {"response", s.response},
                      {"treatment", s.treatment},
                      {"covariates", covs}};
    if (s.delimiter != '\0') j["input"]["delimiter"] = s.delimiter == '\t' ? std::string("tab") : std::string(1, s.delimiter);
  }
  if (c.generator) j["generator"] = to_json(*c.generator);
  j["binning"] = to_json(c.binning);
  json xs = json::array();
  for (const auto& x : c.interactions) {
    json xj{{"a", x.a}, {"b", x.b}};
    if (x.binning) xj["binning"] = to_json(*x.binning);
    xs.push_back(std::move(xj));
  }
  j["interactions"] = xs;
  j["category_cap"] = c.category_cap;
  json objectives = json::array();
  for (auto d : c.objectives) objectives.push_back(std::string(to_string(d)));
  j["objectives"] = objectives;
  j["min_node_sizes"] = c.min_node_sizes;
  j["depth"] = c.depth;
  j["permutations"] = c.permutations;
  j["alpha"] = c.alpha;
  j["seed"] = c.seed;
  j["honest_fraction"] = c.honest_fraction ? json(*c.honest_fraction) : json(nullptr);
  j["centering"] = std::string(to_string(c.centering));
  j["honest_centering"] = std::string(to_string(c.honest_centering));
  j["criterion"] = c.criterion == Criterion::kDeltaMse ? "mse" : "ate";
  j["output_dir"] = c.output_dir.generic_string();
  return j;
}

}  // namespace rstump
