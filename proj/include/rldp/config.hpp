#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rldp/model.hpp"

namespace rldp {

/// Measure given by label: explicit masses plus an optional multiple of the
/// stationary measure.
struct MeasureSpec {
  std::map<std::string, double> masses;
  double stationary_weight = 0.0;
};

struct SimulateBlock {
  double t = 10.0;
  std::size_t n = 1;
  std::uint64_t seed = 0;
};

struct ExactBlock {
  int t = 10;
};

struct RateBlock {
  MeasureSpec nu;
  double tol = 1e-9;
};

struct LdpBlock {
  MeasureSpec center;
  double eps = 0.05;
  std::vector<double> t_grid;
  std::size_t n = 100000;
  std::uint64_t seed = 0;
  bool importance_sampling = false;
  /// "mc" or "exact".
  std::string method = "mc";
};

struct XiBlock {
  WaitingLaw law{Exponential{1.0}};
  std::vector<double> L_grid;
  /// 0 selects the closed-form tail; otherwise the sample size.
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

struct RecoverBlock {
  MeasureSpec nu;
  std::vector<double> L_schedule;
  std::vector<double> M_schedule;
  std::size_t window_bins = 64;
};

struct ExperimentConfig {
  /// Finite model, either given directly or discretized from jump states.
  RateModel model;
  std::optional<DiscreteJumpModel> jump;
  std::optional<SimulateBlock> simulate;
  std::optional<ExactBlock> exact;
  std::optional<RateBlock> rate;
  std::optional<LdpBlock> ldp;
  std::optional<XiBlock> xi;
  std::optional<RecoverBlock> recover;
};

/// Sets a dotted path ("ldp.eps") in a JSON tree. The value is read as JSON
/// when it parses, else kept as a string.
void apply_override(nlohmann::json& tree, const std::string& assignment);

/// Strict reader: unknown keys and unknown labels raise ConfigError; an
/// invalid model raises ValidationError.
ExperimentConfig parse_config(const nlohmann::json& tree);

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Resolves a measure spec against a model.
MeasureVec resolve_measure(const MeasureSpec& spec, const RateModel& model);

WaitingLaw parse_law(const nlohmann::json& j);

}  // namespace rldp
