#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rldp {

/// Projections below take an optional diagonal metric d (empty = identity)
/// and return argmin_x sum_i d_i (x_i - v_i)^2 over the set.

/// {x >= 0, sum x = mass}.
std::vector<double> project_simplex(std::span<const double> v, double mass = 1.0, std::span<const double> d = {});

/// {x >= 0, sum x = mass, |x - c|_1 <= radius}. Throws InvalidArgument when
/// the set is empty.
std::vector<double> project_simplex_l1_ball(std::span<const double> v, std::span<const double> c, double radius,
                                            double mass = 1.0, std::span<const double> d = {});

/// {x >= 0, sum x = mass, g . x = level}. Throws InvalidArgument when level
/// lies outside [mass min g, mass max g].
std::vector<double> project_simplex_hyperplane(std::span<const double> v, std::span<const double> g, double level,
                                               double mass = 1.0, std::span<const double> d = {});

struct PgOptions {
  int max_iter = 20000;
  /// Stop once a full step moves x by at most this much (sup norm).
  double step_tol = 1e-12;
};

struct PgResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;
using Gradient = std::function<void(std::span<const double>, std::span<double>)>;
/// Positive diagonal curvature estimate at x, written into the second span.
using Curvature = std::function<void(std::span<const double>, std::span<double>)>;
/// Projection of v in the metric d.
using Projection = std::function<std::vector<double>(std::span<const double> v, std::span<const double> d)>;

/// Scaled projected gradient: the trial point is the d-metric projection of
/// x - g / d with d the curvature estimate, followed by Armijo backtracking
/// along the segment to it. Without a curvature estimate d = 1 and the
/// trial step follows Barzilai-Borwein.
PgResult projected_gradient_minimize(const Objective& objective, const Gradient& gradient,
                                     const Projection& project, std::vector<double> x0,
                                     const Curvature& curvature = {}, PgOptions options = {});

}  // namespace rldp
