#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rldp/errors.hpp"
#include "rldp/model.hpp"
#include "rldp/presets.hpp"

using namespace rldp;

namespace {

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("validate accepts M2 and reports every violation") {
  CHECK(validate(presets::m2()).empty());
  CHECK_NOTHROW(require_valid(presets::m2e()));

  RateModel short_weights;
  short_weights.support = {{"a", 0.5, 1.0}, {"b", 0.4, 2.0}};
  const auto v1 = validate(short_weights);
  REQUIRE(v1.size() == 1);
  CHECK(v1[0] == "weights sum 0.9 ≠ 1");

  RateModel zero_tau;
  zero_tau.support = {{"a", 0.5, 0.0}, {"b", 0.5, 2.0}};
  CHECK(mentions(validate(zero_tau), "tau must be strictly positive"));

  RateModel broken;
  broken.support = {{"a", -0.1, kInf}, {"a", 0.5, 1.0}};
  broken.singular = {{"E", -1.0}};
  broken.xi_inf = std::nan("");
  const auto v = validate(broken);
  CHECK(mentions(v, "mu weight must be strictly positive"));
  CHECK(mentions(v, "tau must be finite"));
  CHECK(mentions(v, "duplicate label 'a'"));
  CHECK(mentions(v, "xi must lie in [0, +inf]"));
  CHECK(mentions(v, "xi_inf"));
  CHECK(mentions(v, "weights sum"));
  try {
    require_valid(broken);
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.violations() == v);
  }

  CHECK(mentions(validate(RateModel{}), "no support sites"));
}

TEST_CASE("measures split into absolutely continuous, singular and defect parts") {
  const auto model = presets::m2e();
  const MeasureVec nu({0.3, 0.4}, {0.1});
  CHECK(nu.ac_mass() == doctest::Approx(0.7));
  CHECK(nu.sing_mass() == doctest::Approx(0.1));
  CHECK(nu.defect() == doctest::Approx(0.2));
  CHECK(nu.at(2) == 0.1);
  CHECK(nu.matches(model));
  CHECK_FALSE(nu.matches(presets::m2()));
  CHECK_THROWS_AS(nu.require_matches(presets::m2()), InvalidArgument);
  CHECK_THROWS_AS(MeasureVec({0.7, 0.4}, {}), InvalidArgument);
  CHECK_THROWS_AS(MeasureVec({-0.1, 0.4}, {}), InvalidArgument);
  CHECK_NOTHROW(MeasureVec({0.5, 0.5 + 5e-13}, {}));

  const MeasureVec x({1.0, 0.0}, {0.0}), y({0.0, 0.5}, {0.5});
  CHECK(tv_distance(x, y) == doctest::Approx(1.0));
  CHECK(mix(0.25, x, y) == MeasureVec({0.25, 0.375}, {0.375}));
  CHECK(MeasureVec::zeros(model).total() == 0.0);
}

TEST_CASE("discretizing an Exponential(1) state on unit bins") {
  const auto jm = discretize(presets::exponential_jump(1.0), presets::unit_edges(10), 10.0);
  REQUIRE(jm.model.support.size() == 10);
  REQUIRE(jm.model.singular.size() == 1);
  CHECK(jm.model.singular[0].xi == 1.0);
  CHECK(jm.model.singular[0].label == "y@inf");
  for (int k = 0; k < 9; ++k) {
    // Closed-form bin mass e^{-k} - e^{-(k+1)} and conditional mean.
    const double mass = std::exp(-k) - std::exp(-(k + 1));
    const double mean = (std::exp(-k) * (k + 1) - std::exp(-(k + 1)) * (k + 2)) / mass;
    CHECK(jm.model.support[k].mu == doctest::Approx(mass).epsilon(1e-12));
    CHECK(jm.model.support[k].tau == doctest::Approx(mean).epsilon(1e-12));
  }
  // The last bin carries the tail beyond 9.
  CHECK(jm.model.support[9].mu == doctest::Approx(std::exp(-9.0)).epsilon(1e-12));
  CHECK(jm.model.support[9].tau == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(validate(jm.model).empty());
  CHECK(jm.site_for(0, 0.5) == 0);
  CHECK(jm.site_for(0, 3.0) == 3);
  CHECK(jm.site_for(0, 55.0) == 9);
}

TEST_CASE("discretizing deterministic and Pareto states") {
  const JumpModel det{{{"d", 1.0, WaitingLaw(Deterministic{3.0})}}};
  const auto d = discretize(det, presets::unit_edges(5), 5.0);
  REQUIRE(d.model.support.size() == 1);
  CHECK(d.model.support[0].tau == 3.0);
  CHECK(d.model.singular.empty());

  const JumpModel par{{{"p", 1.0, WaitingLaw(Pareto{1.5, 0.5})}}};
  const auto p = discretize(par, presets::unit_edges(6), 6.0);
  REQUIRE(p.model.singular.size() == 1);
  CHECK(p.model.singular[0].xi == 0.0);
  CHECK_FALSE(p.model.infinite_mean);

  const JumpModel heavy{{{"h", 1.0, WaitingLaw(Pareto{0.8, 1.0})}}};
  const auto h = discretize(heavy, presets::unit_edges(6), 6.0);
  CHECK(h.model.infinite_mean);
  CHECK(std::isfinite(h.model.support.back().tau));

  CHECK_THROWS_AS(discretize(par, std::vector<double>{1.0, 2.0}, 2.0), InvalidArgument);
  CHECK_THROWS_AS(discretize(par, std::vector<double>{0.0, 2.0, 2.0}, 2.0), InvalidArgument);
  CHECK_THROWS_AS(discretize(par, std::vector<double>{0.0, 2.0}, 3.0), InvalidArgument);
}

TEST_CASE("discretize conserves mass") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    JumpModel jm;
    const auto p = oracle::random_simplex(rng, 3, 0.05);
    jm.states = {{"e", p[0], WaitingLaw(Exponential{u(rng)})},
                 {"g", p[1], WaitingLaw(Gamma{u(rng), u(rng)})},
                 {"p", p[2], WaitingLaw(Pareto{u(rng), u(rng)})}};
    double total_p = p[0] + p[1] + p[2];
    for (auto& s : jm.states) s.p /= total_p;
    std::vector<double> edges{0.0};
    const int bins = 2 + static_cast<int>(u(rng) * 4);
    for (int k = 0; k < bins; ++k) edges.push_back(edges.back() + u(rng));
    const auto d = discretize(jm, edges, edges.back());
    double mass = 0.0;
    for (const auto& s : d.model.support) {
      mass += s.mu;
      CHECK(s.mu > 0.0);
      CHECK(s.tau > 0.0);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("jump models are validated") {
  JumpModel jm{{{"a", 0.6, WaitingLaw(Exponential{1.0})}, {"b", 0.6, WaitingLaw(Exponential{1.0})}}};
  CHECK_FALSE(validate(jm).empty());
  CHECK_THROWS_AS(discretize(jm, presets::unit_edges(3), 3.0), ValidationError);
}
