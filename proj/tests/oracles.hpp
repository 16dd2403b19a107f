#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "rldp/model.hpp"

namespace oracle {

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Law of pi_t by depth-first enumeration of every state sequence, keyed by
/// integer time per site. Holding times must be integers.
inline std::map<std::vector<int>, double> enumerate_paths(const rldp::RateModel& model, int t) {
  std::map<std::vector<int>, double> law;
  const std::size_t m = model.support.size();
  std::vector<int> time(m, 0);
  std::function<void(int, double)> walk = [&](int elapsed, double p) {
    for (std::size_t j = 0; j < m; ++j) {
      const int tau = static_cast<int>(model.support[j].tau);
      const double q = p * model.support[j].mu;
      if (elapsed + tau >= t) {
        time[j] += t - elapsed;
        law[time] += q;
        time[j] -= t - elapsed;
      } else {
        time[j] += tau;
        walk(elapsed + tau, q);
        time[j] -= tau;
      }
    }
  };
  walk(0, 1.0);
  return law;
}

/// H(nu|mu) from its variational form sup_phi nu(phi) - log mu(e^phi), for
/// two sites (phi = (0, s)) by a grid over s.
inline double entropy_variational_2(double nu1, double mu1, double lo = -20.0, double hi = 20.0, int n = 400001) {
  double best = -1e300;
  for (int i = 0; i < n; ++i) {
    const double s = lo + (hi - lo) * i / (n - 1);
    const double v = nu1 * s - std::log((1.0 - mu1) + mu1 * std::exp(s));
    best = std::max(best, v);
  }
  return best;
}

/// Rate of nu on a model with only support sites written as the sum over
/// sites of (nu_j / tau_j) log(nu_j / (tau_j W mu_j)), W = nu(1/tau).
inline double rate_by_sum(const rldp::RateModel& model, const std::vector<double>& nu) {
  double w = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) w += nu[j] / model.support[j].tau;
  double r = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j)
    if (nu[j] > 0.0) r += nu[j] / model.support[j].tau * std::log(nu[j] / (model.support[j].tau * w * model.support[j].mu));
  return r;
}

/// Bisection root of a monotone function on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  const bool up = f(hi) > f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(mid) > 0.0) == up ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

/// min I(nu) subject to nu(g) = level over absolutely continuous nu, from
/// the two-multiplier stationarity condition nubar_j = mubar_j
/// e^{tau_j (a + b g_j)}.
inline double constrained_rate(const rldp::RateModel& model, const std::vector<double>& g, double level) {
  const std::size_t m = model.support.size();
  std::vector<double> nu(m);
  auto a_of = [&](double b) {
    return bisect(
        [&](double a) {
          double s = 0.0;
          for (std::size_t j = 0; j < m; ++j)
            s += model.support[j].mu * std::exp(model.support[j].tau * (a + b * g[j]));
          return s - 1.0;
        },
        -60.0, 60.0);
  };
  auto moment = [&](double b) {
    const double a = a_of(b);
    double z = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const auto& s = model.support[j];
      nu[j] = s.tau * s.mu * std::exp(s.tau * (a + b * g[j]));
      z += nu[j];
    }
    double e = 0.0;
    for (std::size_t j = 0; j < m; ++j) e += (nu[j] /= z) * g[j];
    return e - level;
  };
  moment(bisect(moment, -40.0, 40.0));
  return rate_by_sum(model, nu);
}

/// Random probability vector with every weight >= floor.
inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n, double floor = 0.0) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(n);
  double s = 0.0;
  for (auto& v : x) s += v = e(rng);
  for (auto& v : x) v = floor + (1.0 - floor * static_cast<double>(n)) * v / s;
  return x;
}

/// Random finite model: m support sites, holding times in [0.2, 5], and the
/// given singular xi values.
inline rldp::RateModel random_model(std::mt19937_64& rng, std::size_t m, const std::vector<double>& xi = {}) {
  std::uniform_real_distribution<double> tau(0.2, 5.0);
  rldp::RateModel model;
  const auto mu = random_simplex(rng, m, 0.02);
  for (std::size_t j = 0; j < m; ++j) model.support.push_back({"s" + std::to_string(j), mu[j], tau(rng)});
  // Absorb rounding so the weights sum to one within 1e-12.
  double total = 0.0;
  for (const auto& s : model.support) total += s.mu;
  for (auto& s : model.support) s.mu /= total;
  for (std::size_t k = 0; k < xi.size(); ++k) model.singular.push_back({"z" + std::to_string(k), xi[k]});
  return model;
}

/// Random probability over all sites of a model.
inline rldp::MeasureVec random_measure(std::mt19937_64& rng, const rldp::RateModel& model, bool singular = true) {
  const std::size_t m = model.support.size(), k = singular ? model.singular.size() : 0;
  const auto w = random_simplex(rng, m + k);
  std::vector<double> ac(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(m));
  std::vector<double> sing(model.singular.size(), 0.0);
  for (std::size_t i = 0; i < k; ++i) sing[i] = w[m + i];
  return rldp::MeasureVec(std::move(ac), std::move(sing));
}

}  // namespace oracle
