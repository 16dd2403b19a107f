#include "rldp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rldp/errors.hpp"
#include "rldp/presets.hpp"
#include "rldp/rate.hpp"

namespace rldp {

using nlohmann::json;

namespace {

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

const json& need(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
  }
  throw ConfigError(where + ": expected a number or \"inf\"");
}

std::uint64_t unsigned_int(const json& j, const std::string& where) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
    throw ConfigError(where + ": expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

MeasureSpec parse_measure(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object of label masses");
  MeasureSpec spec;
  for (const auto& [k, v] : j.items()) {
    if (k == "stationary_weight") spec.stationary_weight = number(v, where + ".stationary_weight");
    else spec.masses[k] = number(v, where + "." + k);
  }
  return spec;
}

void check_labels(const MeasureSpec& spec, const RateModel& model, const std::string& where) {
  for (const auto& [label, mass] : spec.masses)
    if (!model.find(label)) throw ConfigError(where + ": unknown site label '" + label + "'");
}

}  // namespace

WaitingLaw parse_law(const json& j) {
  allow_keys(j, "law", {"kind", "params"});
  const auto kind = text(need(j, "law", "kind"), "law.kind");
  const json& p = need(j, "law", "params");
  auto get = [&](const char* key) { return number(need(p, "law.params", key), std::string("law.params.") + key); };
  try {
    if (kind == "deterministic") {
      allow_keys(p, "law.params", {"value"});
      return WaitingLaw(Deterministic{get("value")});
    }
    if (kind == "exponential") {
      allow_keys(p, "law.params", {"rate"});
      return WaitingLaw(Exponential{get("rate")});
    }
    if (kind == "gamma") {
      allow_keys(p, "law.params", {"shape", "rate"});
      return WaitingLaw(Gamma{get("shape"), get("rate")});
    }
    if (kind == "pareto") {
      allow_keys(p, "law.params", {"alpha", "xmin"});
      return WaitingLaw(Pareto{get("alpha"), get("xmin")});
    }
  } catch (const InvalidArgument& e) {
    throw ValidationError({std::string("law: ") + e.what()});
  }
  throw ConfigError("law.kind: unknown kind '" + kind + "'");
}

void apply_override(json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &tree;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError("override '" + assignment + "': '" + parts[i] + "' is not inside an object");
    if (i + 1 == parts.size()) (*node)[parts[i]] = value;
    else node = &(*node)[parts[i]];
  }
}

ExperimentConfig parse_config(const json& tree) {
  allow_keys(tree, "config",
             {"preset", "support_sites", "singular_sites", "xi_inf", "jump_states", "discretization", "simulate",
              "exact", "rate", "ldp", "xi", "recover"});
  ExperimentConfig cfg;

  const bool direct = tree.contains("support_sites");
  const bool jump = tree.contains("jump_states");
  const bool preset = tree.contains("preset");
  if (direct + jump + preset != 1)
    throw ConfigError("config: give exactly one of 'preset', 'support_sites' or 'jump_states'");

  if (preset) {
    try {
      cfg.model = presets::by_name(text(tree.at("preset"), "preset"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  } else if (direct) {
    if (tree.contains("discretization")) throw ConfigError("config: 'discretization' needs 'jump_states'");
    const json& sites = tree.at("support_sites");
    if (!sites.is_array()) throw ConfigError("support_sites: expected an array");
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const std::string where = "support_sites[" + std::to_string(i) + "]";
      allow_keys(sites[i], where, {"label", "mu", "tau"});
      cfg.model.support.push_back({text(need(sites[i], where, "label"), where + ".label"),
                                   number(need(sites[i], where, "mu"), where + ".mu"),
                                   number(need(sites[i], where, "tau"), where + ".tau")});
    }
    if (tree.contains("singular_sites")) {
      const json& sing = tree.at("singular_sites");
      if (!sing.is_array()) throw ConfigError("singular_sites: expected an array");
      for (std::size_t i = 0; i < sing.size(); ++i) {
        const std::string where = "singular_sites[" + std::to_string(i) + "]";
        allow_keys(sing[i], where, {"label", "xi"});
        cfg.model.singular.push_back(
            {text(need(sing[i], where, "label"), where + ".label"), number(need(sing[i], where, "xi"), where + ".xi")});
      }
    }
    if (tree.contains("xi_inf")) cfg.model.xi_inf = number(tree.at("xi_inf"), "xi_inf");
  } else {
    if (tree.contains("singular_sites") || tree.contains("xi_inf"))
      throw ConfigError("config: 'singular_sites' and 'xi_inf' are derived for jump models");
    const json& states = tree.at("jump_states");
    if (!states.is_array()) throw ConfigError("jump_states: expected an array");
    JumpModel jm;
    for (std::size_t i = 0; i < states.size(); ++i) {
      const std::string where = "jump_states[" + std::to_string(i) + "]";
      allow_keys(states[i], where, {"label", "p", "law"});
      jm.states.push_back({text(need(states[i], where, "label"), where + ".label"),
                           number(need(states[i], where, "p"), where + ".p"), parse_law(need(states[i], where, "law"))});
    }
    const json& disc = need(tree, "config", "discretization");
    allow_keys(disc, "discretization", {"edges", "tail_threshold"});
    const auto edges = numbers(need(disc, "discretization", "edges"), "discretization.edges");
    const double threshold = number(need(disc, "discretization", "tail_threshold"), "discretization.tail_threshold");
    if (auto v = validate(jm); !v.empty()) throw ValidationError(v);
    try {
      cfg.jump = discretize(jm, edges, threshold);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("discretization: ") + e.what());
    }
    cfg.model = cfg.jump->model;
  }
  require_valid(cfg.model);

  if (tree.contains("simulate")) {
    const json& j = tree.at("simulate");
    allow_keys(j, "simulate", {"t", "n", "seed"});
    SimulateBlock b;
    if (j.contains("t")) b.t = number(j.at("t"), "simulate.t");
    if (j.contains("n")) b.n = unsigned_int(j.at("n"), "simulate.n");
    if (j.contains("seed")) b.seed = unsigned_int(j.at("seed"), "simulate.seed");
    cfg.simulate = b;
  }
  if (tree.contains("exact")) {
    const json& j = tree.at("exact");
    allow_keys(j, "exact", {"t"});
    ExactBlock b;
    if (j.contains("t")) b.t = static_cast<int>(unsigned_int(j.at("t"), "exact.t"));
    cfg.exact = b;
  }
  if (tree.contains("rate")) {
    const json& j = tree.at("rate");
    allow_keys(j, "rate", {"nu", "tol"});
    RateBlock b;
    b.nu = parse_measure(need(j, "rate", "nu"), "rate.nu");
    check_labels(b.nu, cfg.model, "rate.nu");
    if (j.contains("tol")) b.tol = number(j.at("tol"), "rate.tol");
    cfg.rate = b;
  }
  if (tree.contains("ldp")) {
    const json& j = tree.at("ldp");
    allow_keys(j, "ldp", {"center", "eps", "t_grid", "n", "seed", "importance_sampling", "method"});
    LdpBlock b;
    b.center = parse_measure(need(j, "ldp", "center"), "ldp.center");
    check_labels(b.center, cfg.model, "ldp.center");
    if (j.contains("eps")) b.eps = number(j.at("eps"), "ldp.eps");
    b.t_grid = numbers(need(j, "ldp", "t_grid"), "ldp.t_grid");
    if (j.contains("n")) b.n = unsigned_int(j.at("n"), "ldp.n");
    if (j.contains("seed")) b.seed = unsigned_int(j.at("seed"), "ldp.seed");
    if (j.contains("importance_sampling")) {
      if (!j.at("importance_sampling").is_boolean()) throw ConfigError("ldp.importance_sampling: expected a boolean");
      b.importance_sampling = j.at("importance_sampling").get<bool>();
    }
    if (j.contains("method")) b.method = text(j.at("method"), "ldp.method");
    if (b.method != "mc" && b.method != "exact") throw ConfigError("ldp.method: expected \"mc\" or \"exact\"");
    cfg.ldp = b;
  }
  if (tree.contains("xi")) {
    const json& j = tree.at("xi");
    allow_keys(j, "xi", {"law", "L_grid", "n", "seed"});
    XiBlock b;
    b.law = parse_law(need(j, "xi", "law"));
    b.L_grid = numbers(need(j, "xi", "L_grid"), "xi.L_grid");
    if (j.contains("n")) b.n = unsigned_int(j.at("n"), "xi.n");
    if (j.contains("seed")) b.seed = unsigned_int(j.at("seed"), "xi.seed");
    cfg.xi = b;
  }
  if (tree.contains("recover")) {
    const json& j = tree.at("recover");
    allow_keys(j, "recover", {"nu", "L_schedule", "M_schedule", "window_bins"});
    if (!cfg.jump) throw ConfigError("recover: needs a jump_states model");
    RecoverBlock b;
    b.nu = parse_measure(need(j, "recover", "nu"), "recover.nu");
    check_labels(b.nu, cfg.model, "recover.nu");
    b.L_schedule = numbers(need(j, "recover", "L_schedule"), "recover.L_schedule");
    b.M_schedule = numbers(need(j, "recover", "M_schedule"), "recover.M_schedule");
    if (b.L_schedule.size() != b.M_schedule.size())
      throw ConfigError("recover: L_schedule and M_schedule differ in length");
    if (j.contains("window_bins")) b.window_bins = unsigned_int(j.at("window_bins"), "recover.window_bins");
    cfg.recover = b;
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json tree;
  try {
    tree = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  for (const auto& o : overrides) apply_override(tree, o);
  return parse_config(tree);
}

MeasureVec resolve_measure(const MeasureSpec& spec, const RateModel& model) {
  auto nu = MeasureVec::zeros(model);
  std::vector<double> ac = nu.ac(), sing = nu.sing();
  if (spec.stationary_weight != 0.0) {
    const auto mu = stationary_measure(model);
    for (std::size_t j = 0; j < ac.size(); ++j) ac[j] += spec.stationary_weight * mu.ac()[j];
  }
  for (const auto& [label, mass] : spec.masses) {
    const auto i = model.find(label);
    if (!i) throw ConfigError("unknown site label '" + label + "'");
    (*i < ac.size() ? ac[*i] : sing[*i - ac.size()]) += mass;
  }
  try {
    return MeasureVec(std::move(ac), std::move(sing));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("measure: ") + e.what());
  }
}

}  // namespace rldp
