#include "rldp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rldp/errors.hpp"

namespace rldp {

Trajectory assemble_trajectory(const RateModel& model, std::span<const std::size_t> visited,
                               std::span<const double> holds, double t, std::uint64_t seed) {
  if (!(t > 0.0)) throw InvalidArgument("horizon t must be positive");
  if (visited.size() != holds.size() || visited.empty())
    throw InvalidArgument("assemble_trajectory: need one hold per visited site");
  Trajectory tr;
  tr.seed = seed;
  tr.t = t;
  tr.visited.assign(visited.begin(), visited.end());
  tr.arrivals.reserve(holds.size() + 1);
  tr.arrivals.push_back(0.0);
  for (double h : holds) tr.arrivals.push_back(tr.arrivals.back() + h);
  const std::size_t n = holds.size() - 1;
  if (!(tr.arrivals[n] < t && tr.arrivals[n + 1] >= t))
    throw InvalidArgument("assemble_trajectory: path must stop at the first arrival reaching t");
  tr.n_t = n;
  tr.pi_t = occupation_measure(model, tr.visited, tr.arrivals, t);
  return tr;
}

MeasureVec occupation_measure(const RateModel& model, std::span<const std::size_t> visited,
                              std::span<const double> arrivals, double t) {
  if (arrivals.size() != visited.size() + 1) throw InvalidArgument("occupation_measure: arrivals size mismatch");
  std::vector<double> w(model.support.size(), 0.0);
  const std::size_t n_t = visited.size() - 1;
  for (std::size_t i = 0; i < n_t; ++i) w.at(visited[i]) += arrivals[i + 1] - arrivals[i];
  w.at(visited[n_t]) += t - arrivals[n_t];
  for (double& x : w) x /= t;
  return MeasureVec(std::move(w), std::vector<double>(model.singular.size(), 0.0));
}

Categorical::Categorical(std::span<const double> weights) {
  cumulative_.reserve(weights.size());
  double acc = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("categorical weights must be >= 0");
    acc += w;
    cumulative_.push_back(acc);
  }
  if (!(acc > 0.0)) throw InvalidArgument("categorical weights sum to zero");
  for (double& c : cumulative_) c /= acc;
  cumulative_.back() = 1.0;
}

std::size_t Categorical::operator()(Engine& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

namespace {

std::vector<double> support_weights(const RateModel& model) {
  std::vector<double> w;
  w.reserve(model.support.size());
  for (const auto& s : model.support) w.push_back(s.mu);
  return w;
}

}  // namespace

PathSampler::PathSampler(const RateModel& model) : n_sites_(model.support.size()) {
  require_valid(model);
  for (const auto& s : model.support) tau_.push_back(s.tau);
  log_ratio_.assign(n_sites_, 0.0);
  auto w = support_weights(model);
  states_.emplace(w);
}

PathSampler::PathSampler(const RateModel& model, std::span<const double> proposal) : n_sites_(model.support.size()) {
  require_valid(model);
  if (proposal.size() != n_sites_) throw InvalidArgument("proposal size does not match model");
  const double z = std::accumulate(proposal.begin(), proposal.end(), 0.0);
  for (std::size_t j = 0; j < n_sites_; ++j) {
    if (!(proposal[j] >= 0.0)) throw InvalidArgument("proposal weights must be >= 0");
    tau_.push_back(model.support[j].tau);
    // A zero-weight site is never drawn; its ratio is never read.
    log_ratio_.push_back(proposal[j] > 0.0 ? std::log(model.support[j].mu) - std::log(proposal[j] / z) : 0.0);
  }
  states_.emplace(proposal);
}

PathSampler::PathSampler(const DiscreteJumpModel& jm) : n_sites_(jm.model.support.size()), jump_(&jm) {
  std::vector<double> p;
  for (const auto& s : jm.source.states) p.push_back(s.p);
  states_.emplace(p);
}

PathResult PathSampler::run(double t, Engine& rng, std::span<double> time_at) const {
  std::fill(time_at.begin(), time_at.end(), 0.0);
  PathResult r;
  double elapsed = 0.0;
  for (std::size_t n = 0;; ++n) {
    const std::size_t x = (*states_)(rng);
    double hold;
    std::size_t site;
    if (jump_) {
      hold = jump_->source.states[x].phi.sample(rng);
      site = jump_->site_for(x, hold);
    } else {
      hold = tau_[x];
      site = x;
      r.log_lr += log_ratio_[x];
    }
    if (elapsed + hold >= t) {
      time_at[site] += t - elapsed;
      r.n_t = n;
      return r;
    }
    time_at[site] += hold;
    elapsed += hold;
  }
}

Trajectory sample_trajectory(const RateModel& model, double t, std::uint64_t seed) {
  if (!(t > 0.0)) throw InvalidArgument("horizon t must be positive");
  require_valid(model);
  auto rng = make_engine(seed, 0);
  Categorical states(support_weights(model));
  std::vector<std::size_t> visited;
  std::vector<double> holds;
  double elapsed = 0.0;
  for (;;) {
    const std::size_t x = states(rng);
    visited.push_back(x);
    holds.push_back(model.support[x].tau);
    elapsed += model.support[x].tau;
    if (elapsed >= t) break;
  }
  return assemble_trajectory(model, visited, holds, t, seed);
}

Trajectory sample_trajectory(const DiscreteJumpModel& jm, double t, std::uint64_t seed) {
  if (!(t > 0.0)) throw InvalidArgument("horizon t must be positive");
  auto rng = make_engine(seed, 0);
  std::vector<double> p;
  for (const auto& s : jm.source.states) p.push_back(s.p);
  Categorical states(p);
  std::vector<std::size_t> visited;
  std::vector<double> holds;
  double elapsed = 0.0;
  for (;;) {
    const std::size_t y = states(rng);
    const double hold = jm.source.states[y].phi.sample(rng);
    visited.push_back(jm.site_for(y, hold));
    holds.push_back(hold);
    elapsed += hold;
    if (elapsed >= t) break;
  }
  return assemble_trajectory(jm.model, visited, holds, t, seed);
}

MomentEstimate empirical_moments(const PathSampler& sampler, double t, std::size_t n, std::uint64_t seed) {
  if (n < 100) throw InvalidArgument("empirical_moments: need n >= 100 replicas");
  if (!(t > 0.0)) throw InvalidArgument("horizon t must be positive");
  std::vector<double> rate(n);
  parallel_for(n, [&](std::size_t i) {
    auto rng = make_engine(seed, i);
    std::vector<double> time_at(sampler.sites());
    rate[i] = static_cast<double>(sampler.run(t, rng, time_at).n_t) / t;
  });
  MomentEstimate est;
  est.n = n;
  double sum = 0.0;
  for (double r : rate) sum += r;
  est.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double r : rate) ss += (r - est.mean) * (r - est.mean);
  est.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  est.lo = est.mean - 1.959963984540054 * est.std_error;
  est.hi = est.mean + 1.959963984540054 * est.std_error;
  return est;
}

MomentEstimate empirical_moments(const RateModel& model, double t, std::size_t n, std::uint64_t seed) {
  return empirical_moments(PathSampler(model), t, n, seed);
}

MomentEstimate empirical_moments(const DiscreteJumpModel& jm, double t, std::size_t n, std::uint64_t seed) {
  return empirical_moments(PathSampler(jm), t, n, seed);
}

MeasureVec ExactLaw::measure(const std::vector<int>& key, const RateModel& model) const {
  std::vector<double> w(key.size());
  for (std::size_t j = 0; j < key.size(); ++j) w[j] = static_cast<double>(key[j]) / t;
  return MeasureVec(std::move(w), std::vector<double>(model.singular.size(), 0.0));
}

double ExactLaw::total() const {
  double s = 0.0;
  for (const auto& [k, p] : atoms) s += p;
  return s;
}

ExactLaw exact_distribution(const RateModel& model, int t, ExactLimits limits) {
  require_valid(model);
  if (t < 1) throw InvalidArgument("exact_distribution: t must be a positive integer");
  if (t > limits.max_t) {
    std::ostringstream os;
    os << "exact_distribution: t = " << t << " exceeds cap " << limits.max_t;
    throw SizeError(os.str());
  }
  if (model.support.size() > limits.max_sites) {
    std::ostringstream os;
    os << "exact_distribution: " << model.support.size() << " support sites exceed cap " << limits.max_sites;
    throw SizeError(os.str());
  }
  const std::size_t m = model.support.size();
  std::vector<int> tau(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double v = model.support[j].tau;
    if (std::fabs(v - std::round(v)) > 1e-9)
      throw InvalidArgument("exact_distribution: site '" + model.support[j].label + "' has non-integer tau");
    tau[j] = static_cast<int>(std::lround(v));
  }

  // frontier[s] holds paths whose completed holds sum to s < t, keyed by the
  // completed time per site.
  std::vector<std::map<std::vector<int>, double>> frontier(static_cast<std::size_t>(t));
  frontier[0][std::vector<int>(m, 0)] = 1.0;
  ExactLaw law;
  law.t = t;
  for (int s = 0; s < t; ++s) {
    for (const auto& [done, p] : frontier[static_cast<std::size_t>(s)]) {
      for (std::size_t j = 0; j < m; ++j) {
        const double q = p * model.support[j].mu;
        auto key = done;
        if (s + tau[j] >= t) {
          key[j] += t - s;
          law.atoms[key] += q;
        } else {
          key[j] += tau[j];
          frontier[static_cast<std::size_t>(s + tau[j])][key] += q;
        }
      }
    }
    frontier[static_cast<std::size_t>(s)].clear();
  }
  return law;
}

RateModel tilted_model(const RateModel& model, std::span<const double> f) {
  require_valid(model);
  if (f.size() != model.support.size()) throw InvalidArgument("tilted_model: f must have one value per support site");
  RateModel out = model;
  double total = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    out.support[j].mu = model.support[j].mu * std::exp(model.support[j].tau * f[j]);
    total += out.support[j].mu;
  }
  if (!(std::fabs(total - 1.0) <= 1e-9)) {
    std::ostringstream os;
    os.precision(17);
    os << "tilted_model: f is not normalized, sum mu e^{tau f} = " << total;
    throw InvalidArgument(os.str());
  }
  for (const auto& s : out.support)
    if (!(s.mu > 0.0)) throw InvalidArgument("tilted_model: tilt removes site '" + s.label + "'");
  // Absorb the 1e-9 slack so the result passes validation.
  if (std::fabs(total - 1.0) > 1e-13)
    for (auto& s : out.support) s.mu /= total;
  return out;
}

}  // namespace rldp
