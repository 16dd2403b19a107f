#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <variant>

namespace rldp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Deterministic {
  double value;
};

struct Exponential {
  double rate;
};

struct Gamma {
  double shape;
  double rate;
};

struct Pareto {
  double alpha;
  double xmin;
};

/// Holding-time law on ]0,+inf[. Parameters are checked on construction.
class WaitingLaw {
 public:
  using Variant = std::variant<Deterministic, Exponential, Gamma, Pareto>;

  WaitingLaw(Deterministic d);
  WaitingLaw(Exponential e);
  WaitingLaw(Gamma g);
  WaitingLaw(Pareto p);

  const Variant& params() const { return params_; }
  std::string kind() const;

  /// sup{c >= 0 : E[e^{cT}] < inf}.
  double abscissa() const;

  /// E[e^{cT}], +inf when it diverges. Finite at the boundary c = abscissa
  /// never happens for the supported families.
  double exp_moment(double c) const;

  /// P(T >= level).
  double tail_prob(double level) const;

  /// log P(T >= level), accurate far below the double range of tail_prob.
  double log_tail_prob(double level) const;

  /// P(lo <= T < hi); hi may be +inf.
  double window_prob(double lo, double hi) const;

  /// E[T ; lo <= T < hi]; +inf when the partial mean diverges.
  double partial_mean(double lo, double hi) const;

  /// E[T]; +inf for Pareto with alpha <= 1.
  double mean() const;

  template <class Engine>
  double sample(Engine& rng) const;

 private:
  Variant params_;
};

template <class Engine>
double WaitingLaw::sample(Engine& rng) const {
  return std::visit(
      [&rng](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          return p.value;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return std::exponential_distribution<double>(p.rate)(rng);
        } else if constexpr (std::is_same_v<T, Gamma>) {
          return std::gamma_distribution<double>(p.shape, 1.0 / p.rate)(rng);
        } else {
          // 1 - U lies in ]0,1], so the draw is finite and >= xmin.
          const double u = 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
          return p.xmin * std::pow(u, -1.0 / p.alpha);
        }
      },
      params_);
}

}  // namespace rldp
