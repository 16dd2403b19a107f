#include "rldp/waiting_law.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <sstream>

#include "rldp/errors.hpp"

namespace rldp {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << " must be strictly positive and finite, got " << v;
    throw InvalidArgument(os.str());
  }
}

// log Q(a, x) for the regularized upper incomplete gamma. Boost underflows
// near Q ~ 1e-308, so deep tails go through the Lentz continued fraction.
double log_gamma_q(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return std::log(boost::math::gamma_q(a, x));
  const double q = boost::math::gamma_q(a, x);
  if (q > 1e-280) return std::log(q);

  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return -x + a * std::log(x) - std::lgamma(a) + std::log(h);
}

// P(lo <= T < hi) from the two log tails; stable when both tails are tiny.
double window_from_log_tails(double log_lo, double log_hi) {
  if (log_lo == -kInf) return 0.0;
  if (log_hi == -kInf) return std::exp(log_lo);
  return std::exp(log_lo) * -std::expm1(log_hi - log_lo);
}

}  // namespace

WaitingLaw::WaitingLaw(Deterministic d) : params_(d) { require_positive(d.value, "deterministic holding time"); }

WaitingLaw::WaitingLaw(Exponential e) : params_(e) { require_positive(e.rate, "exponential rate"); }

WaitingLaw::WaitingLaw(Gamma g) : params_(g) {
  require_positive(g.shape, "gamma shape");
  require_positive(g.rate, "gamma rate");
}

WaitingLaw::WaitingLaw(Pareto p) : params_(p) {
  require_positive(p.alpha, "pareto alpha");
  require_positive(p.xmin, "pareto xmin");
}

std::string WaitingLaw::kind() const {
  static constexpr const char* names[] = {"deterministic", "exponential", "gamma", "pareto"};
  return names[params_.index()];
}

double WaitingLaw::abscissa() const {
  return std::visit(
      [](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Deterministic>) return kInf;
        else if constexpr (std::is_same_v<T, Exponential>) return p.rate;
        else if constexpr (std::is_same_v<T, Gamma>) return p.rate;
        else return 0.0;
      },
      params_);
}

double WaitingLaw::exp_moment(double c) const {
  if (c == 0.0) return 1.0;
  return std::visit(
      [c](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          return std::exp(c * p.value);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return c < p.rate ? p.rate / (p.rate - c) : kInf;
        } else if constexpr (std::is_same_v<T, Gamma>) {
          return c < p.rate ? std::pow(p.rate / (p.rate - c), p.shape) : kInf;
        } else {
          if (c > 0.0) return kInf;
          // alpha * int_1^inf u^{-alpha-1} e^{c xmin u} du after t = xmin u.
          const double s = c * p.xmin;
          const double alpha = p.alpha;
          boost::math::quadrature::exp_sinh<double> integrator;
          auto integrand = [alpha, s](double v) {
            const double u = 1.0 + v;
            return std::exp(s * u - (alpha + 1.0) * std::log(u));
          };
          return alpha * integrator.integrate(integrand, 1e-10);
        }
      },
      params_);
}

double WaitingLaw::tail_prob(double level) const {
  if (level <= 0.0) return 1.0;
  return std::visit(
      [level](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          return level <= p.value ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return std::exp(-p.rate * level);
        } else if constexpr (std::is_same_v<T, Gamma>) {
          return boost::math::gamma_q(p.shape, p.rate * level);
        } else {
          return level <= p.xmin ? 1.0 : std::pow(p.xmin / level, p.alpha);
        }
      },
      params_);
}

double WaitingLaw::log_tail_prob(double level) const {
  if (level <= 0.0) return 0.0;
  if (level == kInf) return -kInf;
  return std::visit(
      [level](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          return level <= p.value ? 0.0 : -kInf;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return -p.rate * level;
        } else if constexpr (std::is_same_v<T, Gamma>) {
          return log_gamma_q(p.shape, p.rate * level);
        } else {
          return level <= p.xmin ? 0.0 : p.alpha * std::log(p.xmin / level);
        }
      },
      params_);
}

double WaitingLaw::window_prob(double lo, double hi) const {
  if (!(hi > lo)) return 0.0;
  return window_from_log_tails(log_tail_prob(lo), log_tail_prob(hi));
}

double WaitingLaw::partial_mean(double lo, double hi) const {
  if (!(hi > lo)) return 0.0;
  lo = std::max(lo, 0.0);
  return std::visit(
      [lo, hi](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          return (lo <= p.value && p.value < hi) ? p.value : 0.0;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          const double r = p.rate;
          const double head = std::exp(-r * lo);
          if (hi == kInf) return head * (lo + 1.0 / r);
          return head * ((lo + 1.0 / r) - (hi + 1.0 / r) * std::exp(-r * (hi - lo)));
        } else if constexpr (std::is_same_v<T, Gamma>) {
          // t * density of Gamma(k, r) = (k / r) * density of Gamma(k + 1, r).
          const WaitingLaw shifted{Gamma{p.shape + 1.0, p.rate}};
          return p.shape / p.rate * shifted.window_prob(lo, hi);
        } else {
          const double a = p.alpha;
          if (hi <= p.xmin) return 0.0;
          const double from = std::max(lo, p.xmin);
          const double scale = a * std::pow(p.xmin, a);
          if (a == 1.0) return hi == kInf ? kInf : scale * std::log(hi / from);
          if (a < 1.0) {
            if (hi == kInf) return kInf;
            return scale * (std::pow(hi, 1.0 - a) - std::pow(from, 1.0 - a)) / (1.0 - a);
          }
          const double ratio = hi == kInf ? 0.0 : std::pow(from / hi, a - 1.0);
          return scale * std::pow(from, 1.0 - a) * (1.0 - ratio) / (a - 1.0);
        }
      },
      params_);
}

double WaitingLaw::mean() const { return partial_mean(0.0, kInf); }

}  // namespace rldp
