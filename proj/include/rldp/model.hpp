#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rldp/waiting_law.hpp"

namespace rldp {

/// A site charged by the reference law: weight mu > 0 and holding time tau.
struct SupportSite {
  std::string label;
  double mu;
  double tau;
};

/// A site with no reference mass. Mass placed here costs xi per unit.
struct SingularSite {
  std::string label;
  double xi;
};

/// Finite reference model: the reference law over support sites, the local
/// exponential-moment abscissa at singular sites, and the cost xi_inf of
/// mass escaping to infinity.
struct RateModel {
  std::vector<SupportSite> support;
  std::vector<SingularSite> singular;
  double xi_inf = kInf;
  /// Set when the model truncates a holding-time law with infinite mean.
  bool infinite_mean = false;

  std::size_t support_size() const { return support.size(); }
  std::size_t singular_size() const { return singular.size(); }

  /// Mean holding time under the reference law.
  double mean_tau() const;

  /// Index of a label in the concatenated (support, singular) site list.
  std::optional<std::size_t> find(const std::string& label) const;
};

/// Every violated invariant, empty when the model is valid.
std::vector<std::string> validate(const RateModel& model);

/// Throws ValidationError unless validate() is empty.
void require_valid(const RateModel& model);

struct JumpState {
  std::string label;
  double p;
  WaitingLaw phi;
};

/// Pure-jump process: states drawn i.i.d. from p, each visit held for a
/// random time with the state's law.
struct JumpModel {
  std::vector<JumpState> states;
};

std::vector<std::string> validate(const JumpModel& model);

/// A (sub-)probability over a RateModel's sites, split into the part on
/// support sites and the part on singular sites.
class MeasureVec {
 public:
  MeasureVec() = default;
  MeasureVec(std::vector<double> ac, std::vector<double> sing);

  /// Zero measure shaped like the model.
  static MeasureVec zeros(const RateModel& model);

  const std::vector<double>& ac() const { return ac_; }
  const std::vector<double>& sing() const { return sing_; }

  double ac_mass() const;
  double sing_mass() const;
  double total() const { return ac_mass() + sing_mass(); }
  double defect() const { return 1.0 - total(); }

  /// Weight of the i-th site in the concatenated (support, singular) order.
  double at(std::size_t i) const { return i < ac_.size() ? ac_[i] : sing_[i - ac_.size()]; }
  std::size_t size() const { return ac_.size() + sing_.size(); }

  bool matches(const RateModel& model) const;

  /// Throws InvalidArgument unless the shape matches the model.
  void require_matches(const RateModel& model) const;

  friend bool operator==(const MeasureVec&, const MeasureVec&) = default;

 private:
  std::vector<double> ac_;
  std::vector<double> sing_;
};

/// Convex combination a * x + (1 - a) * y.
MeasureVec mix(double a, const MeasureVec& x, const MeasureVec& y);

/// Total-variation distance, half the l1 distance over all sites.
double tv_distance(const MeasureVec& x, const MeasureVec& y);

/// A JumpModel binned into a RateModel, keeping the map from (state, holding
/// time) to the support site that carries it.
struct DiscreteJumpModel {
  JumpModel source;
  std::vector<double> edges;
  RateModel model;
  /// site_of_bin[state][k] is the support site of bin [edges[k], edges[k+1]),
  /// or nullopt for a dropped empty bin. Times beyond the last edge map to
  /// the last bin.
  std::vector<std::vector<std::optional<std::size_t>>> site_of_bin;
  /// Singular site standing for (state, +inf), when the abscissa is finite.
  std::vector<std::optional<std::size_t>> singular_of_state;

  /// Support site receiving a holding time drawn at the given state.
  std::size_t site_for(std::size_t state, double holding_time) const;
};

/// Bins every state's holding-time law on [edges[k], edges[k+1]). The mass
/// beyond the last edge is folded into the last bin, and a state with finite
/// abscissa gets a massless singular site carrying that abscissa.
DiscreteJumpModel discretize(const JumpModel& jm, std::span<const double> edges, double tail_threshold);

}  // namespace rldp
