#pragma once

#include <span>
#include <string>
#include <vector>

#include "rldp/model.hpp"

namespace rldp {

/// H(nu|mu) = sum_j mu_j h(nu_j / mu_j), h(r) = r (log r - 1) + 1. Both
/// arguments must be probability vectors of the same length.
double relative_entropy(std::span<const double> nu, std::span<const double> mu);

/// nu(1/tau) over the absolutely continuous part.
double inverse_tau_mass(const RateModel& model, const MeasureVec& nu);

/// Time-change of the absolutely continuous part: weights nu_j / tau_j,
/// normalized. Throws when nu has no absolutely continuous mass.
std::vector<double> nubar(const MeasureVec& nu, const RateModel& model);

/// Reference law weighted by tau: mu_j = tau_j mubar_j / mubar(tau).
MeasureVec stationary_measure(const RateModel& model);

/// nu_a(1/tau) H(nubar_a | mubar), zero when nu_a(1/tau) = 0.
double ac_cost(const RateModel& model, const MeasureVec& nu);

/// The rate functional: ac_cost + sum of singular mass times xi + defect
/// times xi_inf. A zero factor against +inf contributes 0.
double rate_primal(const RateModel& model, const MeasureVec& nu);

/// Test function attaining the dual supremum.
struct DualCertificate {
  /// One value per support site; -inf where nu puts no mass.
  std::vector<double> f;
  /// min(xi, cap) per singular site.
  std::vector<double> f_singular;
  /// min(xi_inf, cap), used against the mass defect.
  double f_defect = 0.0;
  double lambda = 0.0;
  double value = 0.0;
  /// sum_j mubar_j e^{tau_j f_j} - 1.
  double constraint_residual = 0.0;
  std::string method;
  int iterations = 0;
};

struct DualOptions {
  double tol = 1e-9;
  /// Cap on test-function values where xi (or xi_inf) is infinite.
  double cap = 1e6;
  int max_iter = 200;
  int gradient_max_iter = 20000;
  /// Skip the KKT root-finding and go straight to gradient ascent.
  bool force_gradient = false;
};

struct DualResult {
  double value = 0.0;
  DualCertificate certificate;
};

/// sup nu(f) over f with sum_j mubar_j e^{tau_j f_j} <= 1 and f <= xi at
/// singular sites. Reports +inf when the capped value keeps growing.
DualResult rate_dual(const RateModel& model, const MeasureVec& nu, const DualOptions& options = {});

enum class MinimizerCase {
  kUnique,         // no site with xi = 0: the only zero is mu
  kSegment,        // zero set E present, mean holding time finite
  kZeroSetOnly,    // zero set E present, infinite mean before truncation
};

std::string to_string(MinimizerCase c);

struct MinimizerProbe {
  double alpha = 0.0;
  /// Singular index of the zero-set site mixed in, or -1 for mu alone.
  long zero_site = -1;
  MeasureVec nu;
  double rate = 0.0;
};

struct MinimizerReport {
  MinimizerCase kind = MinimizerCase::kUnique;
  MeasureVec mu;
  /// Singular indices with xi = 0.
  std::vector<std::size_t> zero_set;
  std::vector<MinimizerProbe> claimed;
  std::vector<MinimizerProbe> perturbed;
  double max_claimed_rate = 0.0;
  double min_perturbed_rate = kInf;
  bool verified = false;
};

/// Classifies the zero set of the rate functional and checks it: the rate
/// vanishes on alpha mu + (1 - alpha) delta_e for alpha on a grid and e in
/// the zero set, and is positive after moving `shift` mass off that set.
MinimizerReport minimizer_classification(const RateModel& model, double shift = 0.05);

/// Absolutely continuous approximant of a measure with singular atoms.
struct Recovery {
  DiscreteJumpModel refined;
  MeasureVec nu;
  double j_value = 0.0;
  /// nu_a(1/tau) H(nubar_a|mubar) + sum_j s_j (-log mubar(A_j)) / mubar(tau|A_j)
  double convex_bound = 0.0;
  /// Rate of the original measure on the coarse model.
  double target = 0.0;
};

/// Spreads each singular atom at (state, +inf) over the holding times in
/// [L, M) of that state, weighted by tau, on a refined binning with
/// `window_bins` bins across the window. The absolutely continuous part is
/// carried over with its time-changed density unchanged.
Recovery recovery_sequence(const DiscreteJumpModel& coarse, const MeasureVec& nu, double L, double M,
                           std::size_t window_bins = 64);

}  // namespace rldp
