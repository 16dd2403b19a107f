#include "rldp/presets.hpp"

#include <cmath>
#include <sstream>

#include "rldp/errors.hpp"

namespace rldp::presets {

RateModel m2() {
  RateModel m;
  m.support = {{"a", 0.5, 1.0}, {"b", 0.5, 2.0}};
  return m;
}

RateModel m2e() {
  auto m = m2();
  m.singular = {{"E", 0.0}};
  return m;
}

RateModel sanov(const std::vector<double>& mu) {
  RateModel m;
  for (std::size_t i = 0; i < mu.size(); ++i) m.support.push_back({"s" + std::to_string(i), mu[i], 1.0});
  return m;
}

JumpModel exponential_jump(double rate) { return JumpModel{{{"y", 1.0, WaitingLaw(Exponential{rate})}}}; }

JumpModel exponential_states(const std::vector<double>& theta) {
  JumpModel jm;
  for (std::size_t i = 0; i < theta.size(); ++i)
    jm.states.push_back({"y" + std::to_string(i), 1.0 / static_cast<double>(theta.size()),
                         WaitingLaw(Exponential{1.0 / theta[i]})});
  return jm;
}

JumpModel mixed_jump() {
  return JumpModel{{{"light", 0.5, WaitingLaw(Exponential{2.0})}, {"heavy", 0.5, WaitingLaw(Pareto{3.0, 0.5})}}};
}

std::vector<double> unit_edges(int threshold) {
  std::vector<double> e;
  for (int k = 0; k <= threshold; ++k) e.push_back(k);
  return e;
}

HotParticle hot_particle(int n, int grid, double beta) {
  if (n < 1 || n > 3) throw InvalidArgument("hot_particle: n must be 1, 2 or 3");
  if (grid < 2) throw InvalidArgument("hot_particle: grid needs at least 2 points");
  if (!(beta > 0.0)) throw InvalidArgument("hot_particle: beta must be positive");
  std::size_t sites = 1;
  for (int i = 0; i < n; ++i) sites *= static_cast<std::size_t>(grid);
  if (sites > 4096) {
    std::ostringstream os;
    os << "hot_particle: " << grid << "^" << n << " = " << sites << " product sites exceeds the cap 4096";
    throw InvalidArgument(os.str());
  }

  HotParticle hp;
  hp.n = n;
  hp.beta = beta;
  // Midpoint grid on (0, 4 / sqrt(beta)], far into the Gaussian tail.
  const double top = 4.0 / std::sqrt(beta);
  const double h = top / grid;
  std::vector<double> w;
  double z = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double x = (k + 0.5) * h;
    hp.speeds.push_back(x);
    w.push_back(x * std::exp(-beta * x * x));
    z += w.back();
  }
  for (auto& v : w) v /= z;

  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t s = 0; s < sites; ++s) {
    double mu = 1.0, inv = 0.0, speed = 0.0;
    std::string label = "x";
    for (int i = 0; i < n; ++i) {
      const double x = hp.speeds[static_cast<std::size_t>(idx[i])];
      mu *= w[static_cast<std::size_t>(idx[i])];
      inv += 1.0 / x;
      speed += x;
      label += (i ? "," : "(") + std::to_string(idx[i]);
    }
    label += ")";
    const double tau = inv / n;
    hp.model.support.push_back({label, mu, tau});
    // Segment i lasts 1 / (n x_i) with energy x_i^2 / 2.
    hp.kinetic.push_back(speed / (2.0 * n) / tau);
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < grid) break;
      idx[i] = 0;
    }
  }
  // Float products need not sum to exactly one.
  double total = 0.0;
  for (const auto& s : hp.model.support) total += s.mu;
  for (auto& s : hp.model.support) s.mu /= total;
  hp.model.singular = {{"rest", 0.0}};
  return hp;
}

RateModel by_name(const std::string& name) {
  if (name == "m2") return m2();
  if (name == "m2e") return m2e();
  if (name == "sanov3") return sanov({0.2, 0.3, 0.5});
  throw InvalidArgument("unknown preset '" + name + "'");
}

}  // namespace rldp::presets
