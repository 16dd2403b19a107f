#include "rldp/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "rldp/errors.hpp"

namespace rldp {

using nlohmann::json;

json number_json(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_null()) return std::nan("");
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ConfigError("expected a number, \"inf\" or \"-inf\"");
}

namespace {

json numbers_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

std::vector<double> numbers_from_json(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number_from_json(x));
  return out;
}

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

// Quotes a field holding a comma or a quote.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

void to_json(json& j, const MeasureVec& nu) { j = json{{"ac", numbers_json(nu.ac())}, {"singular", numbers_json(nu.sing())}}; }

void from_json(const json& j, MeasureVec& nu) {
  nu = MeasureVec(numbers_from_json(j.at("ac")), numbers_from_json(j.at("singular")));
}

json labelled_json(const MeasureVec& nu, const RateModel& model) {
  nu.require_matches(model);
  json j = json::object();
  for (std::size_t i = 0; i < model.support.size(); ++i) j[model.support[i].label] = number_json(nu.ac()[i]);
  for (std::size_t k = 0; k < model.singular.size(); ++k) j[model.singular[k].label] = number_json(nu.sing()[k]);
  return j;
}

void to_json(json& j, const LdpRow& row) {
  j = json{{"t", number_json(row.t)},         {"p", number_json(row.p)},   {"stderr", number_json(row.std_error)},
           {"method", row.method},            {"hits", row.hits},          {"underflow", row.underflow}};
}

void from_json(const json& j, LdpRow& row) {
  row.t = number_from_json(j.at("t"));
  row.p = number_from_json(j.at("p"));
  row.std_error = number_from_json(j.at("stderr"));
  row.method = j.at("method").get<std::string>();
  row.hits = j.at("hits").get<std::size_t>();
  row.underflow = j.at("underflow").get<bool>();
}

void to_json(json& j, const SlopeFit& fit) {
  j = json{{"slope", number_json(fit.slope)},
           {"slope_stderr", number_json(fit.slope_stderr)},
           {"intercept", number_json(fit.intercept)},
           {"points", fit.points}};
}

void from_json(const json& j, SlopeFit& fit) {
  fit.slope = number_from_json(j.at("slope"));
  fit.slope_stderr = number_from_json(j.at("slope_stderr"));
  fit.intercept = number_from_json(j.at("intercept"));
  fit.points = j.at("points").get<std::size_t>();
}

void to_json(json& j, const LdpReport& rep) {
  j = json{{"center", rep.center},     {"eps", number_json(rep.eps)},           {"metric", rep.metric},
           {"rows", rep.rows},         {"fit", rep.fit},                        {"rate_inf", number_json(rep.rate_inf)},
           {"argmin", rep.argmin},     {"relative_gap", number_json(rep.relative_gap)}};
}

void from_json(const json& j, LdpReport& rep) {
  rep.center = j.at("center").get<MeasureVec>();
  rep.eps = number_from_json(j.at("eps"));
  rep.metric = j.at("metric").get<std::string>();
  rep.rows = j.at("rows").get<std::vector<LdpRow>>();
  rep.fit = j.at("fit").get<SlopeFit>();
  rep.rate_inf = number_from_json(j.at("rate_inf"));
  rep.argmin = j.at("argmin").get<MeasureVec>();
  rep.relative_gap = number_from_json(j.at("relative_gap"));
}

void to_json(json& j, const DualCertificate& cert) {
  j = json{{"f", numbers_json(cert.f)},
           {"f_singular", numbers_json(cert.f_singular)},
           {"f_defect", number_json(cert.f_defect)},
           {"lambda", number_json(cert.lambda)},
           {"value", number_json(cert.value)},
           {"constraint_residual", number_json(cert.constraint_residual)},
           {"method", cert.method},
           {"iterations", cert.iterations}};
}

json exact_law_json(const ExactLaw& law, const RateModel& model) {
  json sites = json::array();
  for (const auto& s : model.support) sites.push_back(s.label);
  json atoms = json::object();
  for (const auto& [key, p] : law.atoms) {
    std::string k;
    for (std::size_t i = 0; i < key.size(); ++i) k += (i ? "," : "") + std::to_string(key[i]);
    atoms[k] = p;
  }
  return json{{"t", law.t}, {"sites", sites}, {"atoms", atoms}};
}

json model_json(const RateModel& model) {
  json support = json::array(), singular = json::array();
  for (const auto& s : model.support)
    support.push_back({{"label", s.label}, {"mu", number_json(s.mu)}, {"tau", number_json(s.tau)}});
  for (const auto& s : model.singular) singular.push_back({{"label", s.label}, {"xi", number_json(s.xi)}});
  return json{{"support_sites", support},
              {"singular_sites", singular},
              {"xi_inf", number_json(model.xi_inf)},
              {"infinite_mean", model.infinite_mean}};
}

std::string trajectory_csv_rows(const Trajectory& tr, const RateModel& model) {
  std::ostringstream os;
  for (std::size_t i = 0; i < model.support.size(); ++i) {
    const double w = tr.pi_t.ac()[i];
    if (w == 0.0) continue;
    os << tr.seed << ',' << format_double(tr.t) << ',' << tr.n_t << ',' << csv_field(model.support[i].label) << ','
       << format_double(w) << '\n';
  }
  return os.str();
}

std::string ldp_csv(const LdpReport& rep) {
  std::ostringstream os;
  os << "t,p,stderr,method\n";
  for (const auto& r : rep.rows)
    os << format_double(r.t) << ',' << format_double(r.p) << ',' << format_double(r.std_error) << ',' << r.method
       << '\n';
  return os.str();
}

std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

}  // namespace rldp
