#include "rldp/rate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "rldp/errors.hpp"

namespace rldp {

namespace {

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Product with the convention 0 * inf = 0.
double cost(double mass, double price) { return mass > 0.0 ? mass * price : 0.0; }

constexpr double kDefectSlack = 1e-12;

std::vector<double> reference_weights(const RateModel& model) {
  std::vector<double> w;
  for (const auto& s : model.support) w.push_back(s.mu);
  return w;
}

}  // namespace

double relative_entropy(std::span<const double> nu, std::span<const double> mu) {
  if (nu.size() != mu.size()) throw InvalidArgument("relative_entropy: length mismatch");
  if (std::fabs(sum(nu) - 1.0) > 1e-12 || std::fabs(sum(mu) - 1.0) > 1e-12)
    throw InvalidArgument("relative_entropy: arguments must be normalized");
  double h = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (mu[j] == 0.0) {
      if (nu[j] > 0.0) return kInf;
      continue;
    }
    if (nu[j] == 0.0) {
      h += mu[j];
      continue;
    }
    const double r = nu[j] / mu[j];
    h += mu[j] * (r * (std::log(r) - 1.0) + 1.0);
  }
  return std::max(h, 0.0);
}

double inverse_tau_mass(const RateModel& model, const MeasureVec& nu) {
  nu.require_matches(model);
  double w = 0.0;
  for (std::size_t j = 0; j < model.support.size(); ++j) w += nu.ac()[j] / model.support[j].tau;
  return w;
}

std::vector<double> nubar(const MeasureVec& nu, const RateModel& model) {
  const double w = inverse_tau_mass(model, nu);
  if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("nubar undefined: no absolutely continuous mass");
  std::vector<double> out(model.support.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = nu.ac()[j] / model.support[j].tau / w;
  return out;
}

MeasureVec stationary_measure(const RateModel& model) {
  const double mean = model.mean_tau();
  std::vector<double> ac;
  for (const auto& s : model.support) ac.push_back(s.tau * s.mu / mean);
  return MeasureVec(std::move(ac), std::vector<double>(model.singular.size(), 0.0));
}

double ac_cost(const RateModel& model, const MeasureVec& nu) {
  const double w = inverse_tau_mass(model, nu);
  if (w == 0.0) return 0.0;
  return w * relative_entropy(nubar(nu, model), reference_weights(model));
}

double rate_primal(const RateModel& model, const MeasureVec& nu) {
  double value = ac_cost(model, nu);
  for (std::size_t k = 0; k < model.singular.size(); ++k) value += cost(nu.sing()[k], model.singular[k].xi);
  const double defect = nu.defect();
  if (defect > kDefectSlack) value += cost(defect, model.xi_inf);
  return value;
}

namespace {

struct AcDual {
  std::vector<double> f;
  double lambda = 0.0;
  int iterations = 0;
  bool ok = false;
};

// KKT family f_j(lambda) = log(nu_j / (lambda mubar_j tau_j)) / tau_j and
// bisection on log(lambda) for sum_j mubar_j e^{tau_j f_j} = 1.
AcDual solve_kkt(const RateModel& model, const MeasureVec& nu, const DualOptions& opt) {
  const std::size_t m = model.support.size();
  AcDual out;
  out.f.assign(m, -kInf);
  auto f_at = [&](double log_lambda, std::size_t j) {
    const auto& s = model.support[j];
    return (std::log(nu.ac()[j]) - log_lambda - std::log(s.mu) - std::log(s.tau)) / s.tau;
  };
  auto residual = [&](double log_lambda) {
    double g = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (nu.ac()[j] > 0.0) g += model.support[j].mu * std::exp(model.support[j].tau * f_at(log_lambda, j));
    return g - 1.0;
  };

  double lo = 0.0, hi = 0.0;
  for (double step = 1.0; residual(lo) < 0.0; step *= 2.0) {
    lo -= step;
    if (++out.iterations > opt.max_iter) return out;
  }
  for (double step = 1.0; residual(hi) > 0.0; step *= 2.0) {
    hi += step;
    if (++out.iterations > opt.max_iter) return out;
  }
  double mid = 0.5 * (lo + hi);
  for (;;) {
    mid = 0.5 * (lo + hi);
    const double g = residual(mid);
    if (std::fabs(g) <= 1e-12 || hi - lo < 1e-15) break;
    if (g > 0.0) lo = mid;
    else hi = mid;
    if (++out.iterations > opt.max_iter) return out;
  }
  out.lambda = std::exp(mid);
  for (std::size_t j = 0; j < m; ++j)
    if (nu.ac()[j] > 0.0) out.f[j] = f_at(mid, j);
  out.ok = std::all_of(out.f.begin(), out.f.end(), [](double v) { return !std::isnan(v) && v < kInf; });
  return out;
}

// Ascent on phi = tau f for sum_j w_j phi_j - W log sum_j mubar_j e^{phi_j}
// over the sites nu charges, then a shift onto the constraint.
AcDual solve_gradient(const RateModel& model, const MeasureVec& nu, const DualOptions& opt) {
  const std::size_t m = model.support.size();
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < m; ++j)
    if (nu.ac()[j] > 0.0) active.push_back(j);
  const auto target = nubar(nu, model);

  std::vector<double> phi(m, 0.0), q(m, 0.0);
  AcDual out;
  out.f.assign(m, -kInf);
  auto softmax = [&] {
    double top = -kInf;
    for (auto j : active) top = std::max(top, std::log(model.support[j].mu) + phi[j]);
    double z = 0.0;
    for (auto j : active) z += q[j] = std::exp(std::log(model.support[j].mu) + phi[j] - top);
    for (auto j : active) q[j] /= z;
    return top + std::log(z);
  };
  double log_z = softmax();
  for (out.iterations = 0; out.iterations < opt.gradient_max_iter; ++out.iterations) {
    double gap = 0.0;
    for (auto j : active) gap = std::max(gap, std::fabs(target[j] - q[j]));
    if (gap <= 1e-15) break;
    // Diagonally scaled step; the scale bounds each coordinate's curvature.
    for (auto j : active) phi[j] += 0.5 * (target[j] - q[j]) / std::max(target[j], q[j]);
    log_z = softmax();
  }
  out.ok = out.iterations < opt.gradient_max_iter;
  out.lambda = inverse_tau_mass(model, nu);
  for (auto j : active) out.f[j] = (phi[j] - log_z) / model.support[j].tau;
  return out;
}

// Value of a capped linear term; +inf when it keeps growing with the cap.
double capped_value(double mass, double price, double cap, double& f_used) {
  if (!(mass > 0.0)) {
    f_used = std::min(price, cap);
    return 0.0;
  }
  double m = cap;
  double previous = mass * std::min(price, m);
  for (int k = 0; k < 3; ++k) {
    m *= 10.0;
    const double next = mass * std::min(price, m);
    if (next == previous) {
      f_used = std::min(price, m);
      return next;
    }
    previous = next;
  }
  f_used = std::min(price, cap);
  return kInf;
}

}  // namespace

DualResult rate_dual(const RateModel& model, const MeasureVec& nu, const DualOptions& opt) {
  if (!(opt.tol > 0.0)) throw InvalidArgument("rate_dual: tol must be positive");
  nu.require_matches(model);
  const std::size_t m = model.support.size();

  DualCertificate cert;
  cert.f.assign(m, -kInf);
  double value = 0.0;

  if (inverse_tau_mass(model, nu) > 0.0) {
    AcDual ac;
    if (!opt.force_gradient) {
      ac = solve_kkt(model, nu, opt);
      cert.method = "kkt-bisection";
    }
    if (!ac.ok) {
      ac = solve_gradient(model, nu, opt);
      cert.method = "projected-gradient";
    }
    cert.f = ac.f;
    cert.lambda = ac.lambda;
    cert.iterations = ac.iterations;
    for (std::size_t j = 0; j < m; ++j)
      if (nu.ac()[j] > 0.0) value += nu.ac()[j] * cert.f[j];
    double g = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (cert.f[j] > -kInf) g += model.support[j].mu * std::exp(model.support[j].tau * cert.f[j]);
    cert.constraint_residual = g - 1.0;
    if (!ac.ok) {
      std::ostringstream os;
      os << "rate_dual: no convergence after " << ac.iterations << " iterations";
      throw ConvergenceError(os.str(), value, cert.constraint_residual);
    }
  } else {
    cert.method = "void-constraint";
    cert.constraint_residual = -1.0;
  }

  cert.f_singular.resize(model.singular.size());
  for (std::size_t k = 0; k < model.singular.size(); ++k)
    value += capped_value(nu.sing()[k], model.singular[k].xi, opt.cap, cert.f_singular[k]);
  const double defect = nu.defect();
  value += capped_value(defect > kDefectSlack ? defect : 0.0, model.xi_inf, opt.cap, cert.f_defect);

  cert.value = value;
  return {value, std::move(cert)};
}

std::string to_string(MinimizerCase c) {
  switch (c) {
    case MinimizerCase::kUnique: return "1";
    case MinimizerCase::kSegment: return "2A";
    case MinimizerCase::kZeroSetOnly: return "2B";
  }
  return "?";
}

namespace {

MeasureVec point_mass_singular(const RateModel& model, std::size_t k) {
  auto z = MeasureVec::zeros(model);
  std::vector<double> sing = z.sing();
  sing[k] = 1.0;
  return MeasureVec(z.ac(), std::move(sing));
}

// Moves `shift` mass from site `from` to site `to` (concatenated indices).
std::optional<MeasureVec> transfer(const MeasureVec& nu, std::size_t from, std::size_t to, double shift) {
  if (nu.at(from) < shift) return std::nullopt;
  std::vector<double> ac = nu.ac(), sing = nu.sing();
  auto slot = [&](std::size_t i) -> double& { return i < ac.size() ? ac[i] : sing[i - ac.size()]; };
  slot(from) = std::max(0.0, slot(from) - shift);
  slot(to) += shift;
  return MeasureVec(std::move(ac), std::move(sing));
}

}  // namespace

MinimizerReport minimizer_classification(const RateModel& model, double shift) {
  require_valid(model);
  MinimizerReport rep;
  rep.mu = stationary_measure(model);
  for (std::size_t k = 0; k < model.singular.size(); ++k)
    if (model.singular[k].xi == 0.0) rep.zero_set.push_back(k);
  if (rep.zero_set.empty()) rep.kind = MinimizerCase::kUnique;
  else rep.kind = model.infinite_mean ? MinimizerCase::kZeroSetOnly : MinimizerCase::kSegment;

  const std::size_t m = model.support.size();
  auto probe = [&](double alpha, long site, MeasureVec nu) {
    return MinimizerProbe{alpha, site, nu, rate_primal(model, nu)};
  };
  if (rep.zero_set.empty()) {
    rep.claimed.push_back(probe(1.0, -1, rep.mu));
  } else {
    for (auto k : rep.zero_set)
      for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0})
        rep.claimed.push_back(probe(alpha, static_cast<long>(k), mix(alpha, rep.mu, point_mass_singular(model, k))));
    if (rep.zero_set.size() > 1) {
      // Uniform law on the zero set.
      auto z = MeasureVec::zeros(model);
      std::vector<double> sing = z.sing();
      for (auto k : rep.zero_set) sing[k] = 1.0 / static_cast<double>(rep.zero_set.size());
      rep.claimed.push_back(probe(0.0, -1, MeasureVec(z.ac(), std::move(sing))));
    }
  }

  for (const auto& c : rep.claimed) {
    const bool has_ac = c.nu.ac_mass() > 0.0;
    // Transfers between support sites move off the segment by exactly
    // `shift` in total variation. Without a.c. mass, seed a single site.
    for (std::size_t i = 0; i < m && has_ac; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (i != j)
          if (auto nu = transfer(c.nu, i, j, shift)) rep.perturbed.push_back(probe(c.alpha, c.zero_site, *nu));
    if (!has_ac && c.zero_site >= 0)
      for (std::size_t j = 0; j < m; ++j)
        if (auto nu = transfer(c.nu, m + static_cast<std::size_t>(c.zero_site), j, shift))
          rep.perturbed.push_back(probe(c.alpha, c.zero_site, *nu));
    // Mass pushed onto a costly singular site.
    for (std::size_t k = 0; k < model.singular.size(); ++k) {
      if (model.singular[k].xi == 0.0) continue;
      std::size_t from = 0;
      for (std::size_t i = 0; i < c.nu.size(); ++i)
        if (c.nu.at(i) > c.nu.at(from)) from = i;
      if (auto nu = transfer(c.nu, from, m + k, shift)) rep.perturbed.push_back(probe(c.alpha, c.zero_site, *nu));
    }
  }

  rep.max_claimed_rate = 0.0;
  for (const auto& c : rep.claimed) rep.max_claimed_rate = std::max(rep.max_claimed_rate, c.rate);
  rep.min_perturbed_rate = kInf;
  for (const auto& p : rep.perturbed) rep.min_perturbed_rate = std::min(rep.min_perturbed_rate, p.rate);
  rep.verified = rep.max_claimed_rate <= 1e-12 && (rep.perturbed.empty() || rep.min_perturbed_rate > 1e-12);
  return rep;
}

Recovery recovery_sequence(const DiscreteJumpModel& coarse, const MeasureVec& nu, double L, double M,
                           std::size_t window_bins) {
  if (!(L >= 0.0) || !(M > L) || !std::isfinite(M)) throw InvalidArgument("recovery_sequence: need M > L >= 0");
  if (window_bins == 0) throw InvalidArgument("recovery_sequence: window_bins must be positive");
  nu.require_matches(coarse.model);

  Recovery out;
  out.target = rate_primal(coarse.model, nu);
  if (nu.sing_mass() == 0.0) {
    out.refined = coarse;
    out.nu = nu;
    out.j_value = out.target;
    out.convex_bound = out.target;
    return out;
  }

  // Refined edges: the coarse ones, the window grid, and one edge past the
  // window so the folded tail bin stays outside it.
  std::set<double> edge_set(coarse.edges.begin(), coarse.edges.end());
  for (std::size_t i = 0; i <= window_bins; ++i)
    edge_set.insert(L + (M - L) * static_cast<double>(i) / static_cast<double>(window_bins));
  if (M >= coarse.edges.back()) edge_set.insert(2.0 * M);
  std::vector<double> edges(edge_set.begin(), edge_set.end());
  out.refined = discretize(coarse.source, edges, edges.back());
  const auto& fine = out.refined.model;
  const std::size_t bins = edges.size() - 1;

  std::vector<double> ac(fine.support.size(), 0.0);
  const std::size_t coarse_bins = coarse.edges.size() - 1;
  double bound = 0.0;
  for (std::size_t y = 0; y < coarse.source.states.size(); ++y) {
    // Absolutely continuous part: each coarse bin spreads over its sub-bins
    // proportionally to tau mubar, keeping dnubar/dmubar constant.
    for (std::size_t kc = 0; kc < coarse_bins; ++kc) {
      const auto site = coarse.site_of_bin[y][kc];
      if (!site || nu.ac()[*site] == 0.0) continue;
      const double lo = coarse.edges[kc];
      const double hi = kc + 1 == coarse_bins ? kInf : coarse.edges[kc + 1];
      std::vector<std::size_t> subs;
      double weight = 0.0;
      for (std::size_t k = 0; k < bins; ++k) {
        const auto fs = out.refined.site_of_bin[y][k];
        if (fs && edges[k] >= lo && edges[k] < hi) {
          subs.push_back(*fs);
          weight += fine.support[*fs].tau * fine.support[*fs].mu;
        }
      }
      for (auto fs : subs) ac[fs] += nu.ac()[*site] * fine.support[fs].tau * fine.support[fs].mu / weight;
    }

    // Singular atom at (y, +inf): spread over the window [L, M).
    const auto sk = coarse.singular_of_state[y];
    if (!sk || nu.sing()[*sk] == 0.0) continue;
    const double s = nu.sing()[*sk];
    std::vector<std::size_t> subs;
    double weight = 0.0, window_mass = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const auto fs = out.refined.site_of_bin[y][k];
      if (fs && edges[k] >= L && edges[k] < M) {
        subs.push_back(*fs);
        weight += fine.support[*fs].tau * fine.support[*fs].mu;
        window_mass += fine.support[*fs].mu;
      }
    }
    if (!(window_mass > 0.0)) {
      std::ostringstream os;
      os << "recovery_sequence: state '" << coarse.source.states[y].label << "' has no reference mass in [" << L
         << ", " << M << "); increase M";
      throw InvalidArgument(os.str());
    }
    for (auto fs : subs) ac[fs] += s * fine.support[fs].tau * fine.support[fs].mu / weight;
    const double mean_in_window = weight / window_mass;
    bound += s * -std::log(window_mass) / mean_in_window;
  }

  out.nu = MeasureVec(std::move(ac), std::vector<double>(fine.singular.size(), 0.0));
  out.j_value = rate_primal(fine, out.nu);
  std::vector<double> coarse_ac = nu.ac();
  bound += ac_cost(coarse.model, MeasureVec(coarse_ac, std::vector<double>(nu.sing().size(), 0.0)));
  out.convex_bound = bound;
  return out;
}

}  // namespace rldp
