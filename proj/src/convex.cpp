#include "rldp/convex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rldp/errors.hpp"

namespace rldp {

namespace {

constexpr int kBisect = 200;

std::vector<double> metric_or_ones(std::span<const double> d, std::size_t n) {
  if (d.empty()) return std::vector<double>(n, 1.0);
  if (d.size() != n) throw InvalidArgument("projection: metric length mismatch");
  for (double v : d)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("projection: metric must be positive and finite");
  return {d.begin(), d.end()};
}

// x_i = max(0, u_i + a / d_i) with sum x = mass, by a scan over the sorted
// breakpoints a_i = -u_i d_i.
std::vector<double> shift_to_mass(std::span<const double> u, std::span<const double> d, double mass) {
  const std::size_t n = u.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> brk(n);
  for (std::size_t i = 0; i < n; ++i) brk[i] = -u[i] * d[i];
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return brk[a] < brk[b]; });
  double su = 0.0, sinv = 0.0, a = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    su += u[i];
    sinv += 1.0 / d[i];
    a = (mass - su) / sinv;
    if (k + 1 == n || a <= brk[order[k + 1]]) break;
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::max(0.0, u[i] + a / d[i]);
  return x;
}

double soft(double z, double theta) { return std::copysign(std::max(0.0, std::fabs(z) - theta), z); }

}  // namespace

std::vector<double> project_simplex(std::span<const double> v, double mass, std::span<const double> d) {
  if (v.empty()) throw InvalidArgument("project_simplex: empty vector");
  if (!(mass > 0.0)) throw InvalidArgument("project_simplex: mass must be positive");
  const auto w = metric_or_ones(d, v.size());
  return shift_to_mass(v, w, mass);
}

std::vector<double> project_simplex_l1_ball(std::span<const double> v, std::span<const double> c, double radius,
                                            double mass, std::span<const double> d) {
  if (v.size() != c.size()) throw InvalidArgument("project_simplex_l1_ball: length mismatch");
  const auto w = metric_or_ones(d, v.size());
  const double c_mass = std::accumulate(c.begin(), c.end(), 0.0);
  // Distance from c to the simplex of the given mass.
  double gap = std::fabs(mass - c_mass);
  for (double ci : c) gap += ci < 0.0 ? -2.0 * ci : 0.0;
  if (radius < gap - 1e-12) throw InvalidArgument("project_simplex_l1_ball: empty feasible set");

  auto x = shift_to_mass(v, w, mass);
  auto l1 = [&](const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::fabs(y[i] - c[i]);
    return s;
  };
  if (l1(x) <= radius) return x;

  // x_i = max(0, c_i + soft(v_i + a / d_i - c_i, theta / d_i)); a fixes the
  // mass and theta >= 0 the radius, the distance being nonincreasing in theta.
  const std::size_t n = v.size();
  auto at_theta = [&](double theta) {
    auto phi = [&](std::size_t i, double a) { return std::max(0.0, c[i] + soft(v[i] + a / w[i] - c[i], theta / w[i])); };
    auto total = [&](double a) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += phi(i, a);
      return s;
    };
    double lo = -1.0, hi = 1.0;
    while (total(lo) > mass) lo *= 2.0;
    while (total(hi) < mass) hi *= 2.0;
    for (int it = 0; it < kBisect; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (total(mid) < mass ? lo : hi) = mid;
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = phi(i, 0.5 * (lo + hi));
    return y;
  };
  double lo = 0.0, hi = 1.0;
  while (l1(at_theta(hi)) > radius) hi *= 2.0;
  for (int it = 0; it < kBisect; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (l1(at_theta(mid)) > radius ? lo : hi) = mid;
  }
  return at_theta(hi);
}

std::vector<double> project_simplex_hyperplane(std::span<const double> v, std::span<const double> g, double level,
                                               double mass, std::span<const double> d) {
  if (v.size() != g.size() || v.empty()) throw InvalidArgument("project_simplex_hyperplane: length mismatch");
  const auto w = metric_or_ones(d, v.size());
  const auto [gmin, gmax] = std::minmax_element(g.begin(), g.end());
  if (level < mass * *gmin - 1e-12 || level > mass * *gmax + 1e-12)
    throw InvalidArgument("project_simplex_hyperplane: level outside the attainable range");
  const std::size_t n = v.size();
  // x_i = max(0, v_i + (a + b g_i) / d_i): for fixed b a shifted simplex
  // projection, and g.x is nondecreasing in b.
  std::vector<double> shifted(n);
  auto at_b = [&](double b) {
    for (std::size_t i = 0; i < n; ++i) shifted[i] = v[i] + b * g[i] / w[i];
    return shift_to_mass(shifted, w, mass);
  };
  auto moment = [&](const std::vector<double>& y) { return std::inner_product(y.begin(), y.end(), g.begin(), 0.0); };
  const double scale = std::max(std::fabs(*gmin), std::fabs(*gmax)) * mass;
  double lo = -1.0, hi = 1.0;
  for (int k = 0; k < 400 && moment(at_b(lo)) > level; ++k) lo *= 2.0;
  for (int k = 0; k < 400 && moment(at_b(hi)) < level; ++k) hi *= 2.0;
  std::vector<double> x = at_b(0.5 * (lo + hi));
  for (int it = 0; it < kBisect; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    x = at_b(mid);
    const double r = moment(x) - level;
    if (std::fabs(r) <= 1e-14 * scale) break;
    (r < 0.0 ? lo : hi) = mid;
  }
  return x;
}

PgResult projected_gradient_minimize(const Objective& objective, const Gradient& gradient,
                                     const Projection& project, std::vector<double> x0, const Curvature& curvature,
                                     PgOptions options) {
  constexpr double kArmijo = 1e-4;
  const std::size_t n = x0.size();
  PgResult out;
  std::vector<double> d(n, 1.0);
  out.x = project(x0, {});
  out.value = objective(out.x);
  std::vector<double> g(n), g_prev(n), x_prev(n), trial(n), dir(n);
  gradient(out.x, g);
  double s = 1.0;
  for (out.iterations = 0; out.iterations < options.max_iter; ++out.iterations) {
    if (curvature) curvature(out.x, d);
    for (std::size_t i = 0; i < n; ++i) trial[i] = out.x[i] - s * g[i] / d[i];
    const auto target = project(trial, curvature ? std::span<const double>(d) : std::span<const double>());
    double slope = 0.0, dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dir[i] = target[i] - out.x[i];
      slope += g[i] * dir[i];
      dmax = std::max(dmax, std::fabs(dir[i]));
    }
    if (dmax <= options.step_tol || slope >= 0.0) {
      out.converged = true;
      break;
    }
    double lambda = 1.0, value = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = out.x[i] + lambda * dir[i];
      value = objective(trial);
      if (value <= out.value + kArmijo * lambda * slope) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      // No decrease left at working precision.
      out.converged = true;
      break;
    }
    x_prev = out.x;
    g_prev = g;
    out.x = trial;
    out.value = value;
    gradient(out.x, g);
    if (!curvature) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = out.x[i] - x_prev[i];
        ss += dx * dx;
        sy += dx * (g[i] - g_prev[i]);
      }
      s = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : 1.0;
    }
  }
  return out;
}

}  // namespace rldp
