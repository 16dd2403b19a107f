#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rldp/model.hpp"
#include "rldp/parallel.hpp"

namespace rldp {

/// One simulated path up to horizon t.
struct Trajectory {
  std::uint64_t seed = 0;
  double t = 0.0;
  /// Support-site indices x_1, ..., x_{N_t + 1}.
  std::vector<std::size_t> visited;
  /// Arrival times S_0 = 0, S_1, ..., S_{N_t + 1}.
  std::vector<double> arrivals;
  std::size_t n_t = 0;
  MeasureVec pi_t;
};

/// Builds a trajectory from the holding times of a visited sequence. The
/// sequence must stop at the first hold that reaches t.
Trajectory assemble_trajectory(const RateModel& model, std::span<const std::size_t> visited,
                               std::span<const double> holds, double t, std::uint64_t seed = 0);

/// Empirical measure rebuilt from (visited, arrivals): completed holds count
/// in full, the last one only up to t.
MeasureVec occupation_measure(const RateModel& model, std::span<const std::size_t> visited,
                              std::span<const double> arrivals, double t);

Trajectory sample_trajectory(const RateModel& model, double t, std::uint64_t seed);

/// Holding times are drawn from the continuous laws and binned onto the
/// discretized model's support sites.
Trajectory sample_trajectory(const DiscreteJumpModel& jm, double t, std::uint64_t seed);

/// Inverse-CDF sampler over a finite weight vector.
class Categorical {
 public:
  explicit Categorical(std::span<const double> weights);

  std::size_t operator()(Engine& rng) const;

 private:
  std::vector<double> cumulative_;
};

/// Occupation times of one path plus the log likelihood ratio of the
/// reference law against the proposal over x_1, ..., x_{N_t + 1}.
struct PathResult {
  std::size_t n_t = 0;
  double log_lr = 0.0;
};

/// Lean path simulator used by the Monte-Carlo loops.
class PathSampler {
 public:
  /// States i.i.d. from the reference law.
  explicit PathSampler(const RateModel& model);

  /// States i.i.d. from `proposal`; paths carry the reference/proposal
  /// likelihood ratio. Sites the proposal does not charge are never visited,
  /// so the ratio is only unbiased for events avoiding them.
  PathSampler(const RateModel& model, std::span<const double> proposal);

  explicit PathSampler(const DiscreteJumpModel& jm);

  std::size_t sites() const { return n_sites_; }

  /// time_at must have sites() entries; it is overwritten.
  PathResult run(double t, Engine& rng, std::span<double> time_at) const;

 private:
  std::size_t n_sites_;
  std::vector<double> tau_;
  std::vector<double> log_ratio_;
  std::optional<Categorical> states_;
  const DiscreteJumpModel* jump_ = nullptr;
};

struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;
};

/// Monte-Carlo estimate of E[N_t] / t with a normal 95% interval.
MomentEstimate empirical_moments(const PathSampler& sampler, double t, std::size_t n, std::uint64_t seed);
MomentEstimate empirical_moments(const RateModel& model, double t, std::size_t n, std::uint64_t seed);
MomentEstimate empirical_moments(const DiscreteJumpModel& jm, double t, std::size_t n, std::uint64_t seed);

/// Exact law of the empirical measure for integer holding times. Atoms are
/// keyed by the integer time spent at each support site (sum = t).
struct ExactLaw {
  int t = 0;
  std::map<std::vector<int>, double> atoms;

  MeasureVec measure(const std::vector<int>& key, const RateModel& model) const;
  double total() const;
};

struct ExactLimits {
  int max_t = 30;
  std::size_t max_sites = 6;
};

ExactLaw exact_distribution(const RateModel& model, int t, ExactLimits limits = {});

/// Reference law tilted by e^{tau f}. f must be normalized:
/// sum_j mu_j e^{tau_j f_j} = 1 within 1e-9.
RateModel tilted_model(const RateModel& model, std::span<const double> f);

}  // namespace rldp
