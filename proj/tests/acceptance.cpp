#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rldp/harness.hpp"
#include "rldp/parallel.hpp"
#include "rldp/presets.hpp"
#include "rldp/rate.hpp"
#include "rldp/report.hpp"
#include "rldp/simulate.hpp"

using namespace rldp;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

void sanov_recovery() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t m = 1 + i % 5;
    const auto w = oracle::random_simplex(rng, m, 0.01);
    const auto model = presets::sanov(w);
    std::vector<double> mu;
    for (const auto& s : model.support) mu.push_back(s.mu);
    const auto nu = oracle::random_simplex(rng, m);
    worst = std::max(worst, std::fabs(rate_primal(model, MeasureVec(nu, {})) - relative_entropy(nu, mu)));
  }
  report(1, "Sanov recovery", worst <= 1e-12, fmt("100 cases, max |I - H| = %.3g (tol 1e-12)", worst));
}

void primal_dual() {
  std::mt19937_64 rng(202);
  const double xis[] = {0.0, 0.7, kInf};
  double worst = 0.0;
  int finite = 0, mismatched = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> xi;
    for (int k = 0; k < static_cast<int>(rng() % 3); ++k) xi.push_back(xis[rng() % 3]);
    const auto model = oracle::random_model(rng, 1 + rng() % 6, xi);
    const auto nu = oracle::random_measure(rng, model);
    const double p = rate_primal(model, nu), d = rate_dual(model, nu).value;
    if (std::isfinite(p) && std::isfinite(d)) {
      ++finite;
      worst = std::max(worst, std::fabs(p - d));
    } else if (std::isfinite(p) != std::isfinite(d)) {
      ++mismatched;
    }
  }
  report(2, "Primal-dual agreement", worst <= 1e-6 && mismatched == 0,
         fmt("100 models, %d finite, max |primal - dual| = %.3g (tol 1e-6), %d finiteness mismatches", finite, worst,
             mismatched));
}

void exact_oracle() {
  const auto m2 = presets::m2();
  const auto law = exact_distribution(m2, 10);
  const std::size_t n = 1000000;
  const PathSampler sampler(m2);
  std::vector<std::vector<int>> keys(n);
  parallel_for(n, [&](std::size_t i) {
    auto rng = make_engine(303, i);
    std::vector<double> time(2);
    sampler.run(10.0, rng, time);
    keys[i] = {static_cast<int>(std::lround(time[0])), static_cast<int>(std::lround(time[1]))};
  });
  std::map<std::vector<int>, double> counts;
  for (const auto& k : keys) counts[k] += 1.0;
  int checked = 0, outside = 0;
  double worst_z = 0.0;
  for (const auto& [key, p] : law.atoms) {
    if (p < 1e-3) continue;
    ++checked;
    const double hat = counts[key] / n;
    const double se = std::sqrt(p * (1.0 - p) / n);
    const double z = std::fabs(hat - p) / se;
    worst_z = std::max(worst_z, z);
    if (z > 4.0) ++outside;
  }
  const auto t3 = exact_distribution(m2, 3);
  const auto it = t3.atoms.find({3, 0});
  const double p_delta_a = it == t3.atoms.end() ? 0.0 : it->second;
  report(3, "Exact oracle equivalence", outside == 0 && p_delta_a == 0.125,
         fmt("t=10, %d atoms >= 1e-3 vs 1e6 paths, max |z| = %.2f (tol 4), P(pi_3 = delta_a) = %.17g (want 1/8)",
             checked, worst_z, p_delta_a));
}

void ldp_decay() {
  const auto m2 = presets::m2();
  const MeasureVec center({0.5, 0.5}, {});
  const double eps = 0.05;
  const auto ball = ball_infimum(m2, center, eps);
  double grid = kInf;
  for (int i = 0; i <= 10000; ++i) {
    const double p = i * 1e-4;
    if (std::fabs(p - 0.5) < eps) grid = std::min(grid, oracle::rate_by_sum(m2, {p, 1.0 - p}));
  }
  const double dual = rate_dual(m2, ball.argmin).value;
  const bool reference_ok = std::fabs(ball.value - grid) <= 1e-4 * grid && std::fabs(ball.value - dual) <= 1e-9 &&
                            ball.value <= rate_primal(m2, center);

  std::vector<int> exact_grid;
  for (int t = 10; t <= 30; ++t) exact_grid.push_back(t);
  const auto exact = exact_ldp(m2, center, eps, exact_grid);
  std::vector<double> is_grid;
  for (int t = 20; t <= 120; t += 10) is_grid.push_back(t);
  const auto is = mc_ldp(m2, center, eps, is_grid, McOptions{100000, 404, true});
  const bool pass = reference_ok && exact.relative_gap <= 0.15 && is.relative_gap <= 0.15;
  report(4, "LDP decay rate", pass,
         fmt("ball inf %.6f (grid %.6f, dual %.6f); exact t in [10,30] slope %.5f gap %.1f%%; IS t in [20,120] "
             "slope %.5f +- %.5f gap %.1f%% (tol 15%%)",
             ball.value, grid, dual, exact.fit.slope, 100.0 * exact.relative_gap, is.fit.slope, is.fit.slope_stderr,
             100.0 * is.relative_gap));
}

void minimizers() {
  const auto r = minimizer_classification(presets::m2e(), 0.05);
  report(5, "Minimizer classification", r.max_claimed_rate <= 1e-12 && r.min_perturbed_rate >= 1e-3,
         fmt("case %s, max rate on segment %.3g (tol 1e-12), min rate over %zu TV-0.05 perturbations %.4g (>= 1e-3)",
             to_string(r.kind).c_str(), r.max_claimed_rate, r.perturbed.size(), r.min_perturbed_rate));
}

void tail_exponent() {
  const std::vector<double> grid{1.0, 2.0, 4.0, 8.0, 12.0};
  const double analytic = tail_xi_estimate(WaitingLaw(Exponential{2.0}), grid).xi;
  const auto samples = sample_law(WaitingLaw(Exponential{2.0}), 1000000, 505);
  const std::vector<double> sgrid{0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
  const auto sampled = tail_xi_estimate(samples, sgrid);
  std::vector<double> far;
  for (int k = 1; k <= 10; ++k) far.push_back(100.0 * k);
  const double pareto = tail_xi_estimate(WaitingLaw(Pareto{2.0, 1.0}), far).xi;
  const bool pass = std::fabs(analytic - 2.0) <= 1e-6 && std::fabs(sampled.xi - 2.0) <= 0.2 && pareto <= 0.01;
  report(6, "Tail exponent", pass,
         fmt("Exponential(2) analytic %.9f (tol 1e-6), sampled n=1e6 %.4f +- %.4f (tol 10%%), Pareto(2, 1) slope "
             "over L in [100, 1000] %.5f (<= 0.01)",
             analytic, sampled.xi, sampled.std_error, pareto));
}

void renewal_limit() {
  const auto m2 = presets::m2();
  const auto a = empirical_moments(m2, 1000.0, 10000, 606);
  const double want_a = 1.0 / 1.5;
  const auto jm = discretize(presets::exponential_jump(1.0), presets::unit_edges(10), 10.0);
  const auto b = empirical_moments(jm, 1000.0, 10000, 607);
  const double gap_a = std::fabs(a.mean / want_a - 1.0), gap_b = std::fabs(b.mean - 1.0);
  report(7, "Renewal limit", gap_a <= 0.02 && gap_b <= 0.02,
         fmt("M2 E[N_t]/t = %.5f vs %.5f (%.2f%%); Exponential(1) %.5f vs 1 (%.2f%%) (tol 2%%)", a.mean, want_a,
             100.0 * gap_a, b.mean, 100.0 * gap_b));
}

void entropy_budget_check() {
  const auto m2 = presets::m2();
  const MeasureVec nu({0.5, 0.5}, {});
  const std::vector<double> ts{1000.0};
  const auto b = entropy_budget(m2, nu, ts, 10000, 707);
  const double target = rate_primal(m2, nu);
  const double gap = std::fabs(b.rows[0].value / target - 1.0);
  report(8, "Entropy budget", gap <= 0.05,
         fmt("t=1000 value %.6f vs I(nu) %.6f (%.2f%%, tol 5%%)", b.rows[0].value, target, 100.0 * gap));
}

void recovery() {
  const auto coarse = discretize(presets::exponential_jump(1.0), presets::unit_edges(10), 10.0);
  std::vector<double> ac = stationary_measure(coarse.model).ac();
  for (auto& v : ac) v *= 0.6;
  const MeasureVec nu(ac, {0.4});
  const double target = rate_primal(coarse.model, nu);
  std::string detail = fmt("I(nu) = %.4f; J:", target);
  bool decreasing = true;
  double previous = kInf, last = 0.0;
  for (double L : {5.0, 10.0, 20.0, 40.0}) {
    const auto r = recovery_sequence(coarse, nu, L, 4.0 * L);
    detail += fmt(" L=%g %.4f", L, r.j_value);
    decreasing = decreasing && r.j_value <= previous;
    previous = last = r.j_value;
  }
  const double gap = std::fabs(last - target) / target;
  detail += fmt("; %s, final gap %.1f%% (tol 5%%)", decreasing ? "decreasing" : "not decreasing", 100.0 * gap);
  report(9, "Recovery sequence", decreasing && gap <= 0.05, detail);
}

void convexity_determinism() {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = -kInf;
  for (int i = 0; i < 1000; ++i) {
    const auto model = oracle::random_model(rng, 2 + i % 5, {0.0, 0.7});
    const auto x = oracle::random_measure(rng, model), y = oracle::random_measure(rng, model);
    const double a = u(rng);
    const double excess =
        rate_primal(model, mix(a, x, y)) - (a * rate_primal(model, x) + (1.0 - a) * rate_primal(model, y));
    worst = std::max(worst, excess);
  }
  const auto m2 = presets::m2();
  const MeasureVec center({0.5, 0.5}, {});
  const std::vector<double> ts{10.0, 20.0, 40.0};
  const auto render = [&](std::size_t workers) {
    set_threads(workers);
    const nlohmann::json j = mc_ldp(m2, center, 0.05, ts, McOptions{20000, 910, true});
    return dump_report(j);
  };
  const auto first = render(1), second = render(1), wide = render(4);
  set_threads(default_threads());
  const bool same = first == second && first == wide;
  report(10, "Convexity and determinism", worst <= 1e-9 && same,
         fmt("1000 triples, max convexity excess %.3g (tol 1e-9); repeated and 4-worker reports %s", worst,
             same ? "byte-identical" : "differ"));
}

}  // namespace

int main() {
  sanov_recovery();
  primal_dual();
  exact_oracle();
  ldp_decay();
  minimizers();
  tail_exponent();
  renewal_limit();
  entropy_budget_check();
  recovery();
  convexity_determinism();
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
