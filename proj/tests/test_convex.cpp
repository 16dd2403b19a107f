#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rldp/convex.hpp"
#include "rldp/errors.hpp"

using namespace rldp;

namespace {

double weighted_dist(const std::vector<double>& x, const std::vector<double>& v, const std::vector<double>& d) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (d.empty() ? 1.0 : d[i]) * (x[i] - v[i]) * (x[i] - v[i]);
  return s;
}

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> d(n);
  for (auto& x : d) x = std::pow(10.0, u(rng));
  return d;
}

double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

}  // namespace

TEST_CASE("simplex projection is optimal against feasible points") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + i % 7;
    const auto v = random_vec(rng, n, 1.0);
    const std::vector<double> d = i % 2 ? random_weights(rng, n) : std::vector<double>{};
    const double mass = 0.5 + (i % 3);
    const auto x = project_simplex(v, mass, d);
    CHECK(std::accumulate(x.begin(), x.end(), 0.0) == doctest::Approx(mass).epsilon(1e-12));
    CHECK(*std::min_element(x.begin(), x.end()) >= 0.0);
    const double best = weighted_dist(x, v, d);
    for (int k = 0; k < 50; ++k) {
      auto y = oracle::random_simplex(rng, n);
      for (auto& e : y) e *= mass;
      CHECK(weighted_dist(y, v, d) >= best - 1e-10);
    }
  }
  CHECK(project_simplex(std::vector<double>{0.2, 0.8}) == std::vector<double>{0.2, 0.8});
  CHECK(project_simplex(std::vector<double>{5.0, 0.0}) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("simplex and l1 ball projection") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + i % 6;
    const auto c = oracle::random_simplex(rng, n);
    const auto v = random_vec(rng, n, 0.7);
    const std::vector<double> d = i % 2 ? random_weights(rng, n) : std::vector<double>{};
    const double radius = 0.05 + 0.3 * (i % 4);
    const auto x = project_simplex_l1_ball(v, c, radius, 1.0, d);
    CHECK(std::accumulate(x.begin(), x.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(*std::min_element(x.begin(), x.end()) >= 0.0);
    CHECK(l1(x, c) <= radius + 1e-9);
    const double best = weighted_dist(x, v, d);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
      auto y = oracle::random_simplex(rng, n);
      const double dist = l1(y, c);
      if (dist > radius) {
        const double a = radius / dist * u(rng);
        for (std::size_t j = 0; j < n; ++j) y[j] = c[j] + a * (y[j] - c[j]);
      }
      CHECK(weighted_dist(y, v, d) >= best - 1e-8 * (1.0 + best));
    }
  }
  CHECK_THROWS_AS(project_simplex_l1_ball(std::vector<double>{0.5, 0.5}, std::vector<double>{2.0, 0.0}, 0.1),
                  InvalidArgument);
}

TEST_CASE("simplex and hyperplane projection") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + i % 6;
    const auto g = random_vec(rng, n, 2.0);
    const auto v = random_vec(rng, n, 1.0);
    const std::vector<double> d = i % 2 ? random_weights(rng, n) : std::vector<double>{};
    const double lo = *std::min_element(g.begin(), g.end()), hi = *std::max_element(g.begin(), g.end());
    const double level = lo + (0.05 + 0.9 * u(rng)) * (hi - lo);
    const auto x = project_simplex_hyperplane(v, g, level, 1.0, d);
    CHECK(std::accumulate(x.begin(), x.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::inner_product(x.begin(), x.end(), g.begin(), 0.0) == doctest::Approx(level).epsilon(1e-9));
    const double best = weighted_dist(x, v, d);
    // Feasible comparison points: random simplex points pushed onto the
    // hyperplane by mixing with an extreme vertex.
    const std::size_t imin = std::min_element(g.begin(), g.end()) - g.begin();
    const std::size_t imax = std::max_element(g.begin(), g.end()) - g.begin();
    for (int k = 0; k < 50; ++k) {
      auto y = oracle::random_simplex(rng, n);
      const double gy = std::inner_product(y.begin(), y.end(), g.begin(), 0.0);
      const std::size_t vertex = gy > level ? imin : imax;
      const double a = (gy - level) / (gy - g[vertex]);
      for (auto& e : y) e *= 1.0 - a;
      y[vertex] += a;
      CHECK(weighted_dist(y, v, d) >= best - 1e-8 * (1.0 + best));
    }
  }
  CHECK_THROWS_AS(project_simplex_hyperplane(std::vector<double>{0.5, 0.5}, std::vector<double>{0.0, 1.0}, 2.0),
                  InvalidArgument);
}

TEST_CASE("projected gradient on small convex problems") {
  // Quadratic with a known constrained minimizer on the simplex.
  const std::vector<double> target{0.7, 0.5, -0.2};
  const Objective f = [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - target[i]) * (x[i] - target[i]);
    return s;
  };
  const Gradient g = [&](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = 2.0 * (x[i] - target[i]);
  };
  const Projection p = [](std::span<const double> v, std::span<const double> d) { return project_simplex(v, 1.0, d); };
  const auto r = projected_gradient_minimize(f, g, p, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(r.x[1] == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(r.x[2] == doctest::Approx(0.0).epsilon(1e-9));

  // Relative entropy to mu with a diagonal curvature: minimum 0 at mu, and
  // the constrained minimum of an exponential tilt on a hyperplane.
  const std::vector<double> mu{0.1, 0.2, 0.3, 0.4}, gv{0.0, 1.0, 2.0, 3.0};
  const Objective h = [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] > 0.0) s += x[i] * std::log(x[i] / mu[i]);
    return s;
  };
  const Gradient hg = [&](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::log(std::max(x[i], 1e-300) / mu[i]) + 1.0;
  };
  const Curvature hc = [](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = 1.0 / std::max(x[i], 1e-12);
  };
  const Projection hp = [&](std::span<const double> v, std::span<const double> d) {
    return project_simplex_hyperplane(v, gv, 1.0, 1.0, d);
  };
  const auto t = projected_gradient_minimize(h, hg, hp, {0.25, 0.25, 0.25, 0.25}, hc);
  // Tilted law mu_j e^{b g_j} / Z with mean 1.
  const double b = oracle::bisect(
      [&](double s) {
        double z = 0.0, m = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
          z += mu[i] * std::exp(s * gv[i]);
          m += gv[i] * mu[i] * std::exp(s * gv[i]);
        }
        return m / z - 1.0;
      },
      -20.0, 20.0);
  double z = 0.0;
  for (std::size_t i = 0; i < 4; ++i) z += mu[i] * std::exp(b * gv[i]);
  for (std::size_t i = 0; i < 4; ++i) CHECK(t.x[i] == doctest::Approx(mu[i] * std::exp(b * gv[i]) / z).epsilon(1e-7));
  CHECK(t.value == doctest::Approx(b - std::log(z)).epsilon(1e-10));
}
