#include "rldp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rldp/convex.hpp"
#include "rldp/errors.hpp"
#include "rldp/parallel.hpp"
#include "rldp/rate.hpp"
#include "rldp/simulate.hpp"

namespace rldp {

bool in_ball(const MeasureVec& x, const MeasureVec& center, double eps) {
  return tv_distance(x, center) < eps - 1e-12;
}

namespace {

// Rate restricted to the coordinates a minimizer may move: every support
// site and every singular site with finite xi. The rest stay at zero.
class FreeRate {
 public:
  explicit FreeRate(const RateModel& model) : model_(model) {
    for (std::size_t k = 0; k < model.singular.size(); ++k)
      if (std::isfinite(model.singular[k].xi)) free_sing_.push_back(k);
  }

  std::size_t size() const { return model_.support.size() + free_sing_.size(); }
  std::size_t ac_size() const { return model_.support.size(); }

  MeasureVec embed(std::span<const double> x) const {
    const std::size_t m = model_.support.size();
    std::vector<double> ac(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(m));
    std::vector<double> sing(model_.singular.size(), 0.0);
    for (std::size_t i = 0; i < free_sing_.size(); ++i) sing[free_sing_[i]] = x[m + i];
    for (auto& v : ac) v = std::max(v, 0.0);
    for (auto& v : sing) v = std::max(v, 0.0);
    // Projections can overshoot the unit mass by rounding.
    const double total = std::accumulate(ac.begin(), ac.end(), 0.0) + std::accumulate(sing.begin(), sing.end(), 0.0);
    if (total > 1.0) {
      for (auto& v : ac) v /= total;
      for (auto& v : sing) v /= total;
    }
    return MeasureVec(std::move(ac), std::move(sing));
  }

  std::vector<double> restrict(const MeasureVec& nu) const {
    std::vector<double> x = nu.ac();
    for (auto k : free_sing_) x.push_back(nu.sing()[k]);
    return x;
  }

  /// Mass of nu on the frozen coordinates.
  double frozen_mass(const MeasureVec& nu) const {
    double s = 0.0;
    for (std::size_t k = 0; k < model_.singular.size(); ++k)
      if (!std::isfinite(model_.singular[k].xi)) s += nu.sing()[k];
    return s;
  }

  double value(std::span<const double> x) const { return rate_primal(model_, embed(x)); }

  void gradient(std::span<const double> x, std::span<double> g) const {
    const std::size_t m = model_.support.size();
    double w = 0.0;
    for (std::size_t j = 0; j < m; ++j) w += std::max(x[j], 1e-15) / model_.support[j].tau;
    for (std::size_t j = 0; j < m; ++j) {
      const auto& s = model_.support[j];
      const double nubar_j = std::max(x[j], 1e-15) / s.tau / w;
      g[j] = std::log(nubar_j / s.mu) / s.tau;
    }
    for (std::size_t i = 0; i < free_sing_.size(); ++i) g[m + i] = model_.singular[free_sing_[i]].xi;
  }

  /// Diagonal of the Hessian of the entropy part, 1 / (tau_j x_j), with x
  /// floored. Linear singular coordinates borrow the smallest support value.
  void curvature(std::span<const double> x, std::span<double> d) const {
    const std::size_t m = model_.support.size();
    double smallest = kInf;
    for (std::size_t j = 0; j < m; ++j) {
      d[j] = 1.0 / (model_.support[j].tau * std::max(x[j], 1e-12));
      smallest = std::min(smallest, d[j]);
    }
    for (std::size_t i = m; i < d.size(); ++i) d[i] = smallest;
  }

 private:
  const RateModel& model_;
  std::vector<std::size_t> free_sing_;
};

std::vector<double> dirichlet(std::size_t n, Engine& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(n);
  double s = 0.0;
  for (auto& v : x) s += v = e(rng);
  for (auto& v : x) v /= s;
  return x;
}

BallInfimum best_of(const FreeRate& fr, const Projection& proj, const std::vector<std::vector<double>>& starts,
                    double tol) {
  Objective obj = [&](std::span<const double> x) { return fr.value(x); };
  Gradient grad = [&](std::span<const double> x, std::span<double> g) { fr.gradient(x, g); };
  Curvature curv = [&](std::span<const double> x, std::span<double> d) { fr.curvature(x, d); };
  BallInfimum out;
  double best = kInf, worst = -kInf;
  std::vector<double> arg;
  for (const auto& x0 : starts) {
    const auto r = projected_gradient_minimize(obj, grad, proj, x0, curv);
    if (r.value < best) {
      best = r.value;
      arg = r.x;
    }
    worst = std::max(worst, r.value);
  }
  out.value = std::max(best, 0.0);
  out.argmin = fr.embed(arg);
  out.spread = worst - best;
  out.starts = static_cast<int>(starts.size());
  out.certified = out.spread <= tol;
  return out;
}

}  // namespace

BallInfimum ball_infimum(const RateModel& model, const MeasureVec& center, double eps, double tol,
                         std::uint64_t seed) {
  if (!(eps > 0.0)) throw InvalidArgument("ball_infimum: eps must be positive");
  require_valid(model);
  center.require_matches(model);
  FreeRate fr(model);
  const auto c = fr.restrict(center);
  // The frozen coordinates of every candidate are zero, so they use up
  // this much of the l1 budget.
  const double frozen = fr.frozen_mass(center) + std::max(0.0, center.defect());
  const double radius = 2.0 * eps - frozen;
  double gap = std::fabs(1.0 - std::accumulate(c.begin(), c.end(), 0.0));
  if (radius < gap) {
    BallInfimum none;
    none.value = kInf;
    none.argmin = center;
    none.certified = true;
    return none;
  }

  Projection proj = [&](std::span<const double> v, std::span<const double> d) {
    return project_simplex_l1_ball(v, c, radius, 1.0, d);
  };

  std::vector<std::vector<double>> starts;
  starts.push_back(c);
  starts.push_back(fr.restrict(stationary_measure(model)));
  auto rng = make_engine(seed, 0);
  for (int k = 0; k < 3; ++k) starts.push_back(dirichlet(fr.size(), rng));
  return best_of(fr, proj, starts, tol);
}

BallInfimum constrained_infimum(const RateModel& model, std::span<const double> g, double level, double tol) {
  require_valid(model);
  if (g.size() != model.support.size()) throw InvalidArgument("constrained_infimum: observable size mismatch");
  // Only support sites move here; singular sites are pinned by giving the
  // solver a model without them.
  RateModel ac_model = model;
  ac_model.singular.clear();
  FreeRate fr(ac_model);
  Projection proj = [&](std::span<const double> v, std::span<const double> d) {
    return project_simplex_hyperplane(v, g, level, 1.0, d);
  };
  const std::size_t m = model.support.size();
  std::vector<std::vector<double>> starts;
  starts.push_back(stationary_measure(ac_model).ac());
  starts.push_back(std::vector<double>(m, 1.0 / static_cast<double>(m)));
  auto best = best_of(fr, proj, starts, tol);
  best.argmin = MeasureVec(best.argmin.ac(), std::vector<double>(model.singular.size(), 0.0));
  return best;
}

SlopeFit fit_slope(std::span<const LdpRow> rows) {
  std::vector<double> x, y, w;
  bool exact = true;
  for (const auto& r : rows) {
    if (r.underflow || !(r.p > 0.0)) continue;
    x.push_back(r.t);
    y.push_back(-std::log(r.p));
    const double rel = r.std_error / r.p;
    if (r.std_error > 0.0) exact = false;
    w.push_back(1.0 / std::max(rel * rel, 1e-24));
  }
  SlopeFit fit;
  fit.points = x.size();
  if (x.empty()) return fit;
  if (x.size() == 1) {
    fit.slope = y[0] / x[0];
    return fit;
  }
  if (exact) std::fill(w.begin(), w.end(), 1.0);
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xm) * (x[i] - xm);
    sxy += w[i] * (x[i] - xm) * (y[i] - ym);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_slope: horizons must differ");
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  if (exact) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - fit.intercept - fit.slope * x[i];
      rss += e * e;
    }
    fit.slope_stderr = x.size() > 2 ? std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx) : 0.0;
  } else {
    fit.slope_stderr = std::sqrt(1.0 / sxx);
  }
  return fit;
}

namespace {

void finish_report(LdpReport& rep, const RateModel& model) {
  rep.fit = fit_slope(rep.rows);
  const auto inf = ball_infimum(model, rep.center, rep.eps);
  rep.rate_inf = inf.value;
  rep.argmin = inf.argmin;
  rep.relative_gap = rep.rate_inf > 0.0 ? std::fabs(rep.fit.slope - rep.rate_inf) / rep.rate_inf
                                        : std::fabs(rep.fit.slope);
}

// Total variation between the occupation vector time_at / t and center.
double tv_to_center(std::span<const double> time_at, double t, const MeasureVec& center) {
  double d = 0.0;
  for (std::size_t j = 0; j < time_at.size(); ++j) d += std::fabs(time_at[j] / t - center.ac()[j]);
  return 0.5 * (d + center.sing_mass() + std::max(0.0, center.defect()));
}

}  // namespace

LdpReport mc_ldp(const RateModel& model, const MeasureVec& center, double eps, std::span<const double> t_grid,
                 const McOptions& options) {
  if (options.n < 1000) throw InvalidArgument("mc_ldp: need n >= 1000 paths per horizon");
  if (!(eps > 0.0)) throw InvalidArgument("mc_ldp: eps must be positive");
  require_valid(model);
  center.require_matches(model);
  LdpReport rep;
  rep.center = center;
  rep.eps = eps;

  std::optional<PathSampler> sampler;
  if (options.importance_sampling) {
    // Tilt towards the most likely point of the ball.
    const auto inf = ball_infimum(model, center, eps);
    std::vector<double> q(model.support.size(), 0.0);
    if (inf.argmin.ac_mass() > 0.0) q = nubar(inf.argmin, model);
    const bool full = std::all_of(q.begin(), q.end(), [](double v) { return v > 0.0; });
    if (!full) {
      // Defensive mixture so every site stays reachable.
      for (std::size_t j = 0; j < q.size(); ++j) q[j] = 0.95 * q[j] + 0.05 * model.support[j].mu;
    }
    sampler.emplace(model, q);
  } else {
    sampler.emplace(model);
  }

  const std::size_t n = options.n;
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    const double t = t_grid[ti];
    if (!(t > 0.0)) throw InvalidArgument("mc_ldp: horizons must be positive");
    const std::uint64_t base = derive_seed(options.seed, ti);
    std::vector<double> weight(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
      auto rng = make_engine(base, i);
      std::vector<double> time_at(sampler->sites());
      const auto r = sampler->run(t, rng, time_at);
      if (tv_to_center(time_at, t, center) < eps - 1e-12) weight[i] = std::exp(r.log_lr);
    });
    LdpRow row;
    row.t = t;
    row.method = options.importance_sampling ? "is" : "mc";
    double sum = 0.0;
    for (double v : weight) {
      sum += v;
      if (v > 0.0) ++row.hits;
    }
    row.p = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : weight) ss += (v - row.p) * (v - row.p);
    row.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    row.underflow = row.hits == 0;
    rep.rows.push_back(row);
  }
  finish_report(rep, model);
  return rep;
}

LdpReport exact_ldp(const RateModel& model, const MeasureVec& center, double eps, std::span<const int> t_grid) {
  if (!(eps > 0.0)) throw InvalidArgument("exact_ldp: eps must be positive");
  require_valid(model);
  center.require_matches(model);
  LdpReport rep;
  rep.center = center;
  rep.eps = eps;
  for (int t : t_grid) {
    const auto law = exact_distribution(model, t);
    LdpRow row;
    row.t = t;
    row.method = "exact";
    for (const auto& [key, p] : law.atoms)
      if (in_ball(law.measure(key, model), center, eps)) {
        row.p += p;
        ++row.hits;
      }
    row.p = std::min(row.p, 1.0);
    row.underflow = row.hits == 0;
    rep.rows.push_back(row);
  }
  finish_report(rep, model);
  return rep;
}

namespace {

TailFit fit_tail(const std::vector<double>& L, const std::vector<double>& y, const std::vector<double>& w) {
  TailFit fit;
  fit.L_used = L;
  if (L.size() < 2) throw InvalidArgument("tail_xi_estimate: fewer than two usable grid points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < L.size(); ++i) {
    sw += w[i];
    sx += w[i] * L[i];
    sy += w[i] * y[i];
  }
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < L.size(); ++i) {
    sxx += w[i] * (L[i] - xm) * (L[i] - xm);
    sxy += w[i] * (L[i] - xm) * (y[i] - ym);
  }
  fit.xi = sxy / sxx;
  fit.intercept = ym - fit.xi * xm;
  return fit;
}

void check_grid(std::span<const double> L_grid) {
  if (L_grid.size() < 3) throw InvalidArgument("tail_xi_estimate: need at least 3 grid points");
  for (std::size_t i = 0; i < L_grid.size(); ++i) {
    if (!(L_grid[i] >= 0.0) || !std::isfinite(L_grid[i]))
      throw InvalidArgument("tail_xi_estimate: grid points must be finite and >= 0");
    if (i > 0 && !(L_grid[i] > L_grid[i - 1])) throw InvalidArgument("tail_xi_estimate: grid must increase");
  }
}

}  // namespace

TailFit tail_xi_estimate(const WaitingLaw& law, std::span<const double> L_grid) {
  check_grid(L_grid);
  std::vector<double> L, y;
  std::vector<std::string> warnings;
  for (double l : L_grid) {
    const double lt = law.log_tail_prob(l);
    if (!std::isfinite(lt)) {
      std::ostringstream os;
      os << "tail is empty at L = " << l << "; point dropped";
      warnings.push_back(os.str());
      continue;
    }
    L.push_back(l);
    y.push_back(-lt);
  }
  auto fit = fit_tail(L, y, std::vector<double>(L.size(), 1.0));
  double rss = 0.0, sxx = 0.0;
  const double xm = std::accumulate(L.begin(), L.end(), 0.0) / static_cast<double>(L.size());
  for (std::size_t i = 0; i < L.size(); ++i) {
    const double e = y[i] - fit.intercept - fit.xi * L[i];
    rss += e * e;
    sxx += (L[i] - xm) * (L[i] - xm);
  }
  fit.std_error = L.size() > 2 ? std::sqrt(rss / static_cast<double>(L.size() - 2) / sxx) : 0.0;
  fit.warnings = std::move(warnings);
  return fit;
}

TailFit tail_xi_estimate(std::span<const double> samples, std::span<const double> L_grid) {
  check_grid(L_grid);
  if (samples.empty()) throw InvalidArgument("tail_xi_estimate: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<double> L, y, w;
  std::vector<std::string> warnings;
  for (double l : L_grid) {
    const auto k = static_cast<double>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), l));
    if (k == 0.0) {
      std::ostringstream os;
      os << "empty sample tail at L = " << l << "; grid truncated";
      warnings.push_back(os.str());
      break;
    }
    const double p = k / n;
    L.push_back(l);
    y.push_back(-std::log(p));
    // Delta-method variance of -log p-hat, floored for a full tail.
    w.push_back(1.0 / std::max((1.0 - p) / k, 1.0 / (n * n)));
  }
  auto fit = fit_tail(L, y, w);
  double sw = 0, sx = 0;
  for (std::size_t i = 0; i < L.size(); ++i) {
    sw += w[i];
    sx += w[i] * L[i];
  }
  double sxx = 0;
  for (std::size_t i = 0; i < L.size(); ++i) sxx += w[i] * (L[i] - sx / sw) * (L[i] - sx / sw);
  fit.std_error = std::sqrt(1.0 / sxx);
  fit.warnings = std::move(warnings);
  return fit;
}

std::vector<double> sample_law(const WaitingLaw& law, std::size_t n, std::uint64_t seed) {
  constexpr std::size_t kChunk = 4096;
  std::vector<double> out(n);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    auto rng = make_engine(seed, c);
    for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) out[i] = law.sample(rng);
  });
  return out;
}

EntropyBudget entropy_budget(const RateModel& model, const MeasureVec& nu, std::span<const double> t_grid,
                             std::size_t n, std::uint64_t seed) {
  nu.require_matches(model);
  if (nu.sing_mass() > 0.0) throw InvalidArgument("entropy_budget: nu must be absolutely continuous");
  const auto q = nubar(nu, model);
  std::vector<double> mu;
  for (const auto& s : model.support) mu.push_back(s.mu);
  const double h = relative_entropy(q, mu);
  PathSampler sampler(model, q);
  EntropyBudget out;
  out.limit = ac_cost(model, nu);
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    const double t = t_grid[ti];
    const auto est = empirical_moments(sampler, t, n, derive_seed(seed, ti));
    BudgetRow row;
    row.t = t;
    row.mean_n_t = est.mean * t;
    row.value = h * (row.mean_n_t + 1.0) / t;
    row.std_error = h * est.std_error;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace rldp
