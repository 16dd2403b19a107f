#pragma once

#include <string>

#include "json.hpp"
#include "rldp/harness.hpp"
#include "rldp/model.hpp"
#include "rldp/rate.hpp"
#include "rldp/simulate.hpp"

namespace rldp {

inline constexpr int kSchemaVersion = 1;

/// Numbers with infinities spelled "inf" / "-inf" and NaN as null.
nlohmann::json number_json(double x);
double number_from_json(const nlohmann::json& j);

/// Weights as {"ac": [...], "singular": [...]}.
void to_json(nlohmann::json& j, const MeasureVec& nu);
void from_json(const nlohmann::json& j, MeasureVec& nu);

/// Weights keyed by site label.
nlohmann::json labelled_json(const MeasureVec& nu, const RateModel& model);

void to_json(nlohmann::json& j, const LdpRow& row);
void from_json(const nlohmann::json& j, LdpRow& row);
void to_json(nlohmann::json& j, const SlopeFit& fit);
void from_json(const nlohmann::json& j, SlopeFit& fit);
void to_json(nlohmann::json& j, const LdpReport& rep);
void from_json(const nlohmann::json& j, LdpReport& rep);

void to_json(nlohmann::json& j, const DualCertificate& cert);

/// {"t": t, "sites": [labels], "atoms": {"2,8": p, ...}} with keys listing
/// integer time per site.
nlohmann::json exact_law_json(const ExactLaw& law, const RateModel& model);

nlohmann::json model_json(const RateModel& model);

/// CSV rows seed,t,N_t,site,weight, one per charged site.
std::string trajectory_csv_rows(const Trajectory& tr, const RateModel& model);
inline constexpr const char* kTrajectoryCsvHeader = "seed,t,N_t,site,weight\n";

/// CSV with columns t,p,stderr,method.
std::string ldp_csv(const LdpReport& rep);

/// Pretty-printed JSON followed by a newline.
std::string dump_report(const nlohmann::json& j);

}  // namespace rldp
