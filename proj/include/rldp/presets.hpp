#pragma once

#include <string>
#include <vector>

#include "rldp/model.hpp"

namespace rldp::presets {

/// Two sites a, b with mubar = (1/2, 1/2) and tau = (1, 2).
RateModel m2();

/// m2 plus a singular site "E" with xi = 0.
RateModel m2e();

/// Unit holding times over the given weights, labels s0, s1, ...
RateModel sanov(const std::vector<double>& mu);

/// One state "y" held for an Exponential(rate) time.
JumpModel exponential_jump(double rate = 1.0);

/// Exponential holding times with means theta over equally likely states.
JumpModel exponential_states(const std::vector<double>& theta);

/// A light state (Exponential(2)) and a heavy one (Pareto(3, 1/2)).
JumpModel mixed_jump();

/// Integer edges 0, 1, ..., threshold.
std::vector<double> unit_edges(int threshold);

/// Particle on a torus of length 1 crossing n equi-spaced hot points, each
/// resampling the speed from a grid version of x e^{-beta x^2}.
struct HotParticle {
  int n = 2;
  double beta = 1.0;
  /// Speed grid shared by every hot point.
  std::vector<double> speeds;
  /// Product sites, tau = mean of 1/x_i, plus a singular "rest" site with
  /// xi = 0 standing for a zero speed.
  RateModel model;
  /// Time-averaged kinetic energy over a tour, per support site.
  std::vector<double> kinetic;
};

/// Throws InvalidArgument outside 1 <= n <= 3 or when grid^n exceeds 4096.
HotParticle hot_particle(int n = 2, int grid = 32, double beta = 1.0);

/// Named preset lookup: "m2", "m2e", "sanov3".
RateModel by_name(const std::string& name);

}  // namespace rldp::presets
