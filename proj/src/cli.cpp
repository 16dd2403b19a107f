#include "rldp/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "rldp/config.hpp"
#include "rldp/errors.hpp"
#include "rldp/harness.hpp"
#include "rldp/parallel.hpp"
#include "rldp/presets.hpp"
#include "rldp/rate.hpp"
#include "rldp/report.hpp"
#include "rldp/simulate.hpp"

namespace rldp::cli {

using nlohmann::json;

namespace {

struct Options {
  std::string command;
  std::string config;
  std::string out;
  std::string csv;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::vector<std::string> overrides;
};

json header(const std::string& command) { return json{{"schema_version", kSchemaVersion}, {"command", command}}; }

json read_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

ExperimentConfig load(const Options& opt) {
  if (opt.config.empty()) throw ConfigError("--config is required for '" + opt.command + "'");
  json tree = read_tree(opt.config);
  for (const auto& o : opt.overrides) apply_override(tree, o);
  if (opt.seed)
    for (const char* block : {"simulate", "ldp", "xi"})
      if (tree.is_object() && tree.contains(block) && tree[block].is_object()) tree[block]["seed"] = *opt.seed;
  return parse_config(tree);
}

template <class T>
const T& need(const std::optional<T>& block, const char* name) {
  if (!block) throw ConfigError(std::string("config has no '") + name + "' block");
  return *block;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
}

json cmd_validate(const ExperimentConfig& cfg) {
  auto j = header("validate");
  j["valid"] = true;
  j["model"] = model_json(cfg.model);
  return j;
}

json cmd_simulate(const ExperimentConfig& cfg, const Options& opt) {
  const auto b = cfg.simulate.value_or(SimulateBlock{});
  if (b.n == 0) throw ConfigError("simulate.n must be positive");
  auto j = header("simulate");
  j["t"] = b.t;
  j["n"] = b.n;
  j["seed"] = b.seed;
  json paths = json::array();
  std::string csv = kTrajectoryCsvHeader;
  double sum = 0.0;
  for (std::size_t i = 0; i < b.n; ++i) {
    const auto seed = derive_seed(b.seed, i);
    const auto tr = cfg.jump ? sample_trajectory(*cfg.jump, b.t, seed) : sample_trajectory(cfg.model, b.t, seed);
    sum += static_cast<double>(tr.n_t) / b.t;
    paths.push_back({{"seed", seed}, {"n_t", tr.n_t}, {"pi_t", labelled_json(tr.pi_t, cfg.model)}});
    csv += trajectory_csv_rows(tr, cfg.model);
  }
  j["trajectories"] = paths;
  j["mean_n_t_over_t"] = sum / static_cast<double>(b.n);
  if (!opt.csv.empty()) write_file(opt.csv, csv);
  return j;
}

json cmd_exact(const ExperimentConfig& cfg) {
  const auto b = cfg.exact.value_or(ExactBlock{});
  auto j = header("exact");
  j["law"] = exact_law_json(exact_distribution(cfg.model, b.t), cfg.model);
  return j;
}

json cmd_rate(const ExperimentConfig& cfg) {
  const auto& b = need(cfg.rate, "rate");
  const auto nu = resolve_measure(b.nu, cfg.model);
  auto j = header("rate");
  j["nu"] = labelled_json(nu, cfg.model);
  j["mass"] = nu.total();
  j["value"] = number_json(rate_primal(cfg.model, nu));
  j["ac_cost"] = number_json(ac_cost(cfg.model, nu));
  return j;
}

json cmd_dual(const ExperimentConfig& cfg) {
  const auto& b = need(cfg.rate, "rate");
  const auto nu = resolve_measure(b.nu, cfg.model);
  DualOptions o;
  o.tol = b.tol;
  const auto d = rate_dual(cfg.model, nu, o);
  const double primal = rate_primal(cfg.model, nu);
  auto j = header("dual");
  j["nu"] = labelled_json(nu, cfg.model);
  j["value"] = number_json(d.value);
  j["primal"] = number_json(primal);
  j["gap"] = number_json(std::isfinite(primal) && std::isfinite(d.value) ? std::fabs(primal - d.value) : 0.0);
  j["certificate"] = d.certificate;
  return j;
}

json cmd_minimizers(const ExperimentConfig& cfg) {
  const auto rep = minimizer_classification(cfg.model);
  auto j = header("minimizers");
  j["case"] = to_string(rep.kind);
  json zero = json::array();
  for (auto k : rep.zero_set) zero.push_back(cfg.model.singular[k].label);
  j["zero_set"] = zero;
  j["mu"] = labelled_json(rep.mu, cfg.model);
  json claimed = json::array();
  for (const auto& c : rep.claimed)
    claimed.push_back({{"alpha", c.alpha},
                       {"zero_site", c.zero_site >= 0 ? json(cfg.model.singular[static_cast<std::size_t>(c.zero_site)].label)
                                                      : json(nullptr)},
                       {"rate", number_json(c.rate)}});
  j["claimed"] = claimed;
  j["perturbations"] = rep.perturbed.size();
  j["max_claimed_rate"] = number_json(rep.max_claimed_rate);
  j["min_perturbed_rate"] = number_json(rep.min_perturbed_rate);
  j["verified"] = rep.verified;
  return j;
}

json cmd_ldp(const ExperimentConfig& cfg, const Options& opt) {
  const auto& b = need(cfg.ldp, "ldp");
  const auto center = resolve_measure(b.center, cfg.model);
  LdpReport rep;
  if (b.method == "exact") {
    std::vector<int> ts;
    for (double t : b.t_grid) {
      if (t != std::floor(t)) throw ConfigError("ldp.t_grid: exact method needs integer horizons");
      ts.push_back(static_cast<int>(t));
    }
    rep = exact_ldp(cfg.model, center, b.eps, ts);
  } else {
    rep = mc_ldp(cfg.model, center, b.eps, b.t_grid, McOptions{b.n, b.seed, b.importance_sampling});
  }
  auto j = header("ldp");
  j["report"] = rep;
  if (!opt.csv.empty()) write_file(opt.csv, ldp_csv(rep));
  return j;
}

json tail_json(const TailFit& fit) {
  return json{{"xi", number_json(fit.xi)},
              {"stderr", number_json(fit.std_error)},
              {"intercept", number_json(fit.intercept)},
              {"L_used", fit.L_used},
              {"warnings", fit.warnings}};
}

json cmd_xi(const ExperimentConfig& cfg) {
  const auto& b = need(cfg.xi, "xi");
  auto j = header("xi");
  j["law"] = b.law.kind();
  j["abscissa"] = number_json(b.law.abscissa());
  if (b.n == 0) {
    j["method"] = "analytic";
    j["fit"] = tail_json(tail_xi_estimate(b.law, b.L_grid));
  } else {
    j["method"] = "sampled";
    j["n"] = b.n;
    j["seed"] = b.seed;
    j["fit"] = tail_json(tail_xi_estimate(sample_law(b.law, b.n, b.seed), b.L_grid));
  }
  return j;
}

json cmd_recover(const ExperimentConfig& cfg) {
  const auto& b = need(cfg.recover, "recover");
  const auto nu = resolve_measure(b.nu, cfg.model);
  auto j = header("recover");
  j["nu"] = labelled_json(nu, cfg.model);
  j["target"] = number_json(rate_primal(cfg.model, nu));
  json rows = json::array();
  double last = 0.0;
  for (std::size_t i = 0; i < b.L_schedule.size(); ++i) {
    const auto r = recovery_sequence(*cfg.jump, nu, b.L_schedule[i], b.M_schedule[i], b.window_bins);
    rows.push_back({{"L", b.L_schedule[i]},
                    {"M", b.M_schedule[i]},
                    {"j_value", number_json(r.j_value)},
                    {"convex_bound", number_json(r.convex_bound)},
                    {"refined_sites", r.refined.model.support.size()}});
    last = r.j_value;
  }
  j["rows"] = rows;
  const double target = rate_primal(cfg.model, nu);
  if (!rows.empty() && std::isfinite(target))
    j["final_gap"] = number_json(target > 0.0 ? std::fabs(last - target) / target : std::fabs(last));
  return j;
}

json cmd_examples() {
  auto j = header("examples");

  {
    const auto model = presets::sanov({0.2, 0.3, 0.5});
    const MeasureVec nu({1.0 / 3, 1.0 / 3, 1.0 / 3}, {});
    j["a_sanov"] = {{"model", model_json(model)},
                    {"nu", labelled_json(nu, model)},
                    {"rate", rate_primal(model, nu)},
                    {"relative_entropy", relative_entropy(nu.ac(), std::vector<double>{0.2, 0.3, 0.5})},
                    {"dual", rate_dual(model, nu).value}};
  }
  {
    const auto jm = discretize(presets::mixed_jump(), presets::unit_edges(8), 8.0);
    json xi = json::object();
    for (const auto& s : jm.model.singular) xi[s.label] = number_json(s.xi);
    const auto mins = minimizer_classification(jm.model);
    j["b_jump"] = {{"support_sites", jm.model.support.size()},
                   {"xi", xi},
                   {"minimizer_case", to_string(mins.kind)},
                   {"minimizers_verified", mins.verified},
                   {"mean_tau", jm.model.mean_tau()}};
  }
  {
    const std::vector<double> theta{0.5, 1.0, 2.0};
    const auto jm = discretize(presets::exponential_states(theta), presets::unit_edges(12), 12.0);
    json xi = json::object(), expected = json::object();
    for (std::size_t y = 0; y < theta.size(); ++y) {
      const auto& s = jm.model.singular[*jm.singular_of_state[y]];
      xi[s.label] = number_json(s.xi);
      expected[s.label] = 1.0 / theta[y];
    }
    const auto est = empirical_moments(jm, 200.0, 2000, 7);
    j["c_exponential_states"] = {{"xi", xi},
                                 {"xi_expected", expected},
                                 {"renewal_rate", est.mean},
                                 {"renewal_rate_stderr", est.std_error},
                                 {"renewal_rate_limit", 1.0 / (7.0 / 6.0)}};
  }
  {
    const auto hp = presets::hot_particle();
    const auto mu = stationary_measure(hp.model);
    double typical = 0.0;
    for (std::size_t i = 0; i < hp.kinetic.size(); ++i) typical += mu.ac()[i] * hp.kinetic[i];
    json levels = json::array();
    for (double factor : {0.8, 1.25}) {
      const auto best = constrained_infimum(hp.model, hp.kinetic, factor * typical);
      levels.push_back({{"energy", factor * typical}, {"rate", best.value}, {"certified", best.certified}});
    }
    j["d_hot_particle"] = {{"hot_points", hp.n},
                           {"beta", hp.beta},
                           {"support_sites", hp.model.support.size()},
                           {"mean_tau", hp.model.mean_tau()},
                           {"typical_energy", typical},
                           {"minimizer_case", to_string(minimizer_classification(hp.model).kind)},
                           {"energy_rates", levels}};
  }
  return j;
}

json dispatch(const Options& opt) {
  if (opt.command == "examples") return cmd_examples();
  const auto cfg = load(opt);
  if (opt.command == "validate") return cmd_validate(cfg);
  if (opt.command == "simulate") return cmd_simulate(cfg, opt);
  if (opt.command == "exact") return cmd_exact(cfg);
  if (opt.command == "rate") return cmd_rate(cfg);
  if (opt.command == "dual") return cmd_dual(cfg);
  if (opt.command == "minimizers") return cmd_minimizers(cfg);
  if (opt.command == "ldp") return cmd_ldp(cfg, opt);
  if (opt.command == "xi") return cmd_xi(cfg);
  if (opt.command == "recover") return cmd_recover(cfg);
  throw ConfigError("unknown command '" + opt.command + "'");
}

int fail(const Options& opt, std::ostream& err, int code, const std::string& kind, const std::string& message,
         const std::vector<std::string>& violations = {}, std::optional<double> best = {}) {
  auto j = header(opt.command);
  j["error"] = {{"kind", kind}, {"message", message}, {"exit_code", code}};
  if (!violations.empty()) j["error"]["violations"] = violations;
  if (best) j["error"]["best_value"] = number_json(*best);
  const auto text = dump_report(j);
  err << text;
  if (!opt.out.empty()) {
    try {
      write_file(opt.out, text);
    } catch (const Error&) {
    }
  }
  return code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Renewal-process large deviations laboratory"};
  Options opt;
  app.add_option("command", opt.command, "validate | simulate | exact | rate | dual | minimizers | ldp | xi | "
                                         "recover | examples")
      ->required()
      ->check(CLI::IsMember({"validate", "simulate", "exact", "rate", "dual", "minimizers", "ldp", "xi", "recover",
                             "examples"}));
  app.add_option("--config", opt.config, "Experiment config (JSON)");
  app.add_option("--out", opt.out, "Write the JSON report here instead of stdout");
  app.add_option("--csv", opt.csv, "Also write a CSV table (simulate, ldp)");
  app.add_option("--seed", opt.seed, "Override every seed in the config");
  app.add_option("--threads", opt.threads, "Worker threads (default: RLDP_THREADS or all cores)");
  app.add_option("--set", opt.overrides, "Override a config entry, key.path=value")->take_all();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail(opt, err, kParseError, "usage", e.what());
  }

  try {
    set_threads(opt.threads.value_or(default_threads()));
    if (opt.threads && *opt.threads == 0) throw ConfigError("--threads must be positive");
    const auto text = dump_report(dispatch(opt));
    if (opt.out.empty()) out << text;
    else write_file(opt.out, text);
    return kOk;
  } catch (const ConfigError& e) {
    return fail(opt, err, kParseError, "config", e.what());
  } catch (const ValidationError& e) {
    return fail(opt, err, kValidationError, "validation", e.what(), e.violations());
  } catch (const ConvergenceError& e) {
    return fail(opt, err, kConvergenceError, "convergence", e.what(), {}, e.best_value());
  } catch (const std::exception& e) {
    return fail(opt, err, kFailure, "error", e.what());
  }
}

}  // namespace rldp::cli
