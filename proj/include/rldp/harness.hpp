#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rldp/model.hpp"
#include "rldp/waiting_law.hpp"

namespace rldp {

/// Open total-variation ball: tv(x, center) < eps, with 1e-12 slack for
/// lattice points exactly on the sphere.
bool in_ball(const MeasureVec& x, const MeasureVec& center, double eps);

struct BallInfimum {
  double value = 0.0;
  MeasureVec argmin;
  /// Largest disagreement between the restarts.
  double spread = 0.0;
  int starts = 0;
  bool certified = false;
};

/// Minimum of the rate over probability measures within total variation eps
/// of center. Solved by projected gradient from several starts; certified
/// when every start lands within tol of the best.
BallInfimum ball_infimum(const RateModel& model, const MeasureVec& center, double eps, double tol = 1e-5,
                         std::uint64_t seed = 0);

/// Minimum of the rate over absolutely continuous probabilities with
/// nu(g) = level, g given per support site.
BallInfimum constrained_infimum(const RateModel& model, std::span<const double> g, double level,
                                double tol = 1e-5);

struct LdpRow {
  double t = 0.0;
  double p = 0.0;
  double std_error = 0.0;
  std::string method;  // "exact", "mc" or "is"
  std::size_t hits = 0;
  /// No path hit the ball; the row is left out of the slope fit.
  bool underflow = false;
};

/// Fit of -log p = slope t + intercept.
struct SlopeFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Weighted least squares with weights (p / stderr)^2; ordinary least
/// squares with residual-based stderr when every row is exact.
SlopeFit fit_slope(std::span<const LdpRow> rows);

struct LdpReport {
  MeasureVec center;
  double eps = 0.0;
  std::string metric = "tv";
  std::vector<LdpRow> rows;
  SlopeFit fit;
  double rate_inf = 0.0;
  MeasureVec argmin;
  /// |slope - rate_inf| / rate_inf, or the absolute gap when rate_inf = 0.
  double relative_gap = 0.0;
};

struct McOptions {
  std::size_t n = 100000;
  std::uint64_t seed = 0;
  bool importance_sampling = false;
};

/// Monte-Carlo estimate of P(tv(pi_t, center) < eps) per horizon. With
/// importance sampling, states are drawn i.i.d. from nubar of the ball
/// minimizer and each path is reweighted by its exact likelihood ratio.
LdpReport mc_ldp(const RateModel& model, const MeasureVec& center, double eps, std::span<const double> t_grid,
                 const McOptions& options);

/// Same event with exact probabilities from exact_distribution.
LdpReport exact_ldp(const RateModel& model, const MeasureVec& center, double eps, std::span<const int> t_grid);

struct TailFit {
  double xi = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
  std::vector<double> L_used;
  std::vector<std::string> warnings;
};

/// Slope of -log P(T >= L) against L from the closed-form tail.
TailFit tail_xi_estimate(const WaitingLaw& law, std::span<const double> L_grid);

/// Same slope from the empirical tail of a sample, weighted by the delta-
/// method variance (1 - p) / (n p). Grid points with an empty tail are
/// dropped with a warning.
TailFit tail_xi_estimate(std::span<const double> samples, std::span<const double> L_grid);

std::vector<double> sample_law(const WaitingLaw& law, std::size_t n, std::uint64_t seed);

struct BudgetRow {
  double t = 0.0;
  double mean_n_t = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

struct EntropyBudget {
  std::vector<BudgetRow> rows;
  /// nu(1/tau) H(nubar|mubar), the t -> infinity limit.
  double limit = 0.0;
};

/// H(nubar|mubar) (E[N_t] + 1) / t with N_t counted under i.i.d. nubar states.
EntropyBudget entropy_budget(const RateModel& model, const MeasureVec& nu, std::span<const double> t_grid,
                             std::size_t n, std::uint64_t seed);

}  // namespace rldp
