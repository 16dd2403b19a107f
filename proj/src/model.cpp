#include "rldp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "rldp/errors.hpp"

namespace rldp {

namespace {

std::string join_lines(const std::vector<std::string>& items) {
  std::string out = "validation failed";
  for (const auto& s : items) out += "\n  - " + s;
  return out;
}

std::string format_edge(double v) {
  if (v == kInf) return "inf";
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_lines(violations)), violations_(std::move(violations)) {}

double RateModel::mean_tau() const {
  double s = 0.0;
  for (const auto& site : support) s += site.mu * site.tau;
  return s;
}

std::optional<std::size_t> RateModel::find(const std::string& label) const {
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i].label == label) return i;
  for (std::size_t i = 0; i < singular.size(); ++i)
    if (singular[i].label == label) return support.size() + i;
  return std::nullopt;
}

std::vector<std::string> validate(const RateModel& model) {
  std::vector<std::string> out;
  if (model.support.empty()) out.emplace_back("model has no support sites");

  double sum = 0.0;
  std::set<std::string> seen;
  auto check_label = [&](const std::string& label) {
    if (label.empty()) out.emplace_back("site labels must be non-empty");
    if (!seen.insert(label).second) out.push_back("duplicate label '" + label + "'");
  };
  for (const auto& site : model.support) {
    check_label(site.label);
    if (!(site.mu > 0.0) || !std::isfinite(site.mu))
      out.push_back("site '" + site.label + "': mu weight must be strictly positive");
    else
      sum += site.mu;
    if (std::isnan(site.tau) || site.tau <= 0.0)
      out.push_back("site '" + site.label + "': tau must be strictly positive");
    else if (!std::isfinite(site.tau))
      out.push_back("site '" + site.label + "': tau must be finite");
  }
  for (const auto& site : model.singular) {
    check_label(site.label);
    if (std::isnan(site.xi) || site.xi < 0.0)
      out.push_back("singular site '" + site.label + "': xi must lie in [0, +inf]");
  }
  if (std::isnan(model.xi_inf) || model.xi_inf < 0.0) out.emplace_back("xi_inf must lie in [0, +inf]");
  if (!model.support.empty() && std::fabs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "weights sum " << sum << " ≠ 1";
    out.push_back(os.str());
  }
  return out;
}

void require_valid(const RateModel& model) {
  auto violations = validate(model);
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

std::vector<std::string> validate(const JumpModel& model) {
  std::vector<std::string> out;
  if (model.states.empty()) out.emplace_back("jump model has no states");
  double sum = 0.0;
  std::set<std::string> seen;
  for (const auto& s : model.states) {
    if (!seen.insert(s.label).second) out.push_back("duplicate label '" + s.label + "'");
    if (!(s.p > 0.0) || !std::isfinite(s.p))
      out.push_back("state '" + s.label + "': p must be strictly positive");
    else
      sum += s.p;
  }
  if (!model.states.empty() && std::fabs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "state probabilities sum " << sum << " ≠ 1";
    out.push_back(os.str());
  }
  return out;
}

MeasureVec::MeasureVec(std::vector<double> ac, std::vector<double> sing) : ac_(std::move(ac)), sing_(std::move(sing)) {
  for (double w : ac_)
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("measure weights must be finite and >= 0");
  for (double w : sing_)
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("measure weights must be finite and >= 0");
  if (total() > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "measure total mass " << total() << " exceeds 1";
    throw InvalidArgument(os.str());
  }
}

MeasureVec MeasureVec::zeros(const RateModel& model) {
  return MeasureVec(std::vector<double>(model.support.size(), 0.0), std::vector<double>(model.singular.size(), 0.0));
}

double MeasureVec::ac_mass() const { return std::accumulate(ac_.begin(), ac_.end(), 0.0); }

double MeasureVec::sing_mass() const { return std::accumulate(sing_.begin(), sing_.end(), 0.0); }

bool MeasureVec::matches(const RateModel& model) const {
  return ac_.size() == model.support.size() && sing_.size() == model.singular.size();
}

void MeasureVec::require_matches(const RateModel& model) const {
  if (!matches(model)) {
    std::ostringstream os;
    os << "measure shape (" << ac_.size() << " support, " << sing_.size() << " singular) does not match model ("
       << model.support.size() << ", " << model.singular.size() << ")";
    throw InvalidArgument(os.str());
  }
}

MeasureVec mix(double a, const MeasureVec& x, const MeasureVec& y) {
  if (x.ac().size() != y.ac().size() || x.sing().size() != y.sing().size())
    throw InvalidArgument("mix: measures of different shape");
  std::vector<double> ac(x.ac().size()), sing(x.sing().size());
  for (std::size_t i = 0; i < ac.size(); ++i) ac[i] = std::max(0.0, a * x.ac()[i] + (1.0 - a) * y.ac()[i]);
  for (std::size_t i = 0; i < sing.size(); ++i) sing[i] = std::max(0.0, a * x.sing()[i] + (1.0 - a) * y.sing()[i]);
  return MeasureVec(std::move(ac), std::move(sing));
}

double tv_distance(const MeasureVec& x, const MeasureVec& y) {
  if (x.size() != y.size()) throw InvalidArgument("tv_distance: measures of different shape");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::fabs(x.at(i) - y.at(i));
  return 0.5 * s;
}

std::size_t DiscreteJumpModel::site_for(std::size_t state, double holding_time) const {
  const auto& bins = site_of_bin.at(state);
  auto it = std::upper_bound(edges.begin(), edges.end(), holding_time);
  std::size_t k = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
  k = std::min(k, bins.size() - 1);
  if (!bins[k]) {
    std::ostringstream os;
    os << "holding time " << holding_time << " of state '" << source.states[state].label
       << "' fell in a bin of zero probability";
    throw InvalidArgument(os.str());
  }
  return *bins[k];
}

DiscreteJumpModel discretize(const JumpModel& jm, std::span<const double> edges, double tail_threshold) {
  if (auto v = validate(jm); !v.empty()) throw ValidationError(std::move(v));
  if (edges.size() < 2) throw InvalidArgument("discretize: need at least two bin edges");
  if (edges.front() != 0.0) throw InvalidArgument("discretize: bin edges must start at 0");
  for (std::size_t k = 1; k < edges.size(); ++k)
    if (!(edges[k] > edges[k - 1])) throw InvalidArgument("discretize: bin edges must be strictly increasing");
  if (edges.back() != tail_threshold) throw InvalidArgument("discretize: last edge must equal tail_threshold");

  DiscreteJumpModel out;
  out.source = jm;
  out.edges.assign(edges.begin(), edges.end());
  out.model.xi_inf = kInf;
  const std::size_t bins = edges.size() - 1;

  for (std::size_t j = 0; j < jm.states.size(); ++j) {
    const auto& st = jm.states[j];
    const auto& phi = st.phi;
    if (phi.mean() == kInf) out.model.infinite_mean = true;
    std::vector<std::optional<std::size_t>> sites(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      const double lo = edges[k];
      const bool last = k + 1 == bins;
      const double hi = last ? kInf : edges[k + 1];
      const double mass = phi.window_prob(lo, hi);
      if (!(mass > 0.0)) continue;
      double tau = phi.partial_mean(lo, hi) / mass;
      if (!std::isfinite(tau)) {
        // Infinite-mean tail: keep the conditional mean of the finite bin.
        const double bin_mass = phi.window_prob(lo, edges[k + 1]);
        tau = bin_mass > 0.0 ? phi.partial_mean(lo, edges[k + 1]) / bin_mass : edges[k + 1];
      }
      sites[k] = out.model.support.size();
      out.model.support.push_back(
          {st.label + "[" + format_edge(lo) + "," + format_edge(hi) + ")", st.p * mass, tau});
    }
    out.site_of_bin.push_back(std::move(sites));

    const double xi = phi.abscissa();
    if (std::isfinite(xi)) {
      out.singular_of_state.push_back(out.model.singular.size());
      out.model.singular.push_back({st.label + "@inf", xi});
    } else {
      out.singular_of_state.push_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace rldp
