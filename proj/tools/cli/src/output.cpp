#include "ksnd/cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ksnd/cli/errors.hpp"
#include "ksnd/error.hpp"
#include "ksnd/norms.hpp"
#include "ksnd/spectral.hpp"

namespace ksnd::cli {

using nlohmann::json;

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

TimeSeriesWriter::TimeSeriesWriter(std::ostream& out, std::size_t n_orbitals, std::size_t n_nuclei)
    : out_(out), n_orbitals_(n_orbitals), n_nuclei_(n_nuclei) {
  out_ << timeseries_schema << "\n";
  out_ << "time,E,T,W,U,E_X,rho_l1";
  for (std::size_t j = 0; j < n_orbitals; ++j) out_ << ",l2_" << j;
  for (std::size_t k = 0; k < n_nuclei; ++k) out_ << ",x" << k << ",y" << k << ",z" << k;
  for (std::size_t k = 0; k < n_nuclei; ++k) out_ << ",vx" << k << ",vy" << k << ",vz" << k;
  out_ << "\n";
}

std::vector<double> TimeSeriesWriter::row(double time, const OrbitalSet& psi, const NuclearState& nuc, const Physics& physics) {
  if (psi.size() != n_orbitals_ || nuc.size() != n_nuclei_) throw InvalidInput("time series: shape changed");
  const EnergyBreakdown e = total_energy(psi, nuc, physics);
  std::vector<double> v{time, e.E, e.T, e.W, e.U, e.E_X, spectral::integrate(density(psi))};
  for (const auto& f : psi) v.push_back(spectral::l2_norm(f));
  for (const auto& x : nuc.positions) v.insert(v.end(), x.begin(), x.end());
  for (const auto& x : nuc.velocities) v.insert(v.end(), x.begin(), x.end());
  for (double x : v) {
    if (!std::isfinite(x)) throw NonFiniteError("time series: non-finite value at t = " + format_real(time));
  }
  for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << format_real(v[i]);
  out_ << "\n";
  return v;
}

json to_json(const SplitSample& s) {
  return {{"calibrate", s.calibrate}, {"asserted", s.asserted},       {"calibrated_constant", s.calibrated},
          {"margin", s.margin},       {"max_asserted", s.max_asserted}, {"violations", s.violations},
          {"all_finite", s.all_finite}, {"pass", s.pass()}};
}

json to_json(const InequalityResult& r) {
  return {{"name", r.name}, {"max_ratio", r.max_ratio}, {"split", to_json(r.split)}, {"ratios", r.ratios}};
}

json to_json(const ProbeReport& r) {
  json j{{"probe", r.probe}, {"seed", r.seed}, {"samples", r.samples}, {"provenance", r.provenance},
         {"pass", r.pass()}, {"inequalities", json::array()}};
  for (const auto& i : r.inequalities) j["inequalities"].push_back(to_json(i));
  if (!r.diagnostics.empty()) j["diagnostics"] = r.diagnostics;
  return j;
}

json to_json(const ThresholdSweep& s) {
  return {{"q", s.q}, {"min_density", s.min_density}, {"ratios", s.ratios}, {"growth", s.growth},
          {"spread", s.spread}};
}

json to_json(const PropagatorNormReport& r) {
  return {{"thetas", r.thetas}, {"amplification", r.amplification}, {"fit_a", r.fit_a},
          {"fit_b", r.fit_b},   {"A", r.A},                         {"C", r.C},
          {"clamped", r.clamped}, {"max_l2_defect", r.max_l2_defect}, {"provenance", r.provenance}};
}

json to_json(const AdmissibilityReport& r) {
  json j{{"tau", r.tau},     {"gamma", r.gamma},     {"alpha", r.alpha},
         {"delta", r.delta}, {"B", r.B},             {"v0", r.v0},
         {"psi0_h2", r.psi0_h2}, {"admissible", r.admissible}, {"tau_star", r.tau_star},
         {"provenance", r.provenance}, {"conditions", json::array()}};
  for (const auto& c : r.conditions) {
    j["conditions"].push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}});
  }
  return j;
}

json to_json(const UniquenessReport& r) {
  return {{"p", r.p},           {"times", r.times},   {"nuclear_gap", r.nuclear_gap},
          {"electron_gap", r.electron_gap}, {"h", r.h}, {"max_h", r.max_h},
          {"fitted", r.fitted}, {"rate", r.rate},     {"intercept", r.intercept}};
}

json to_json(const OracleResult& r) {
  return {{"name", r.name}, {"error", r.error}, {"tolerance", r.tolerance}, {"pass", r.pass}, {"details", r.details}};
}

json to_json(const ContractionReport& r) {
  json j{{"status", to_string(r.status)}, {"iterations", r.iterations}, {"residuals", r.residuals},
         {"ratios", r.ratios}, {"message", r.message}, {"in_feasible_region", r.in_feasible_region}};
  if (std::isfinite(r.exit_time)) j["exit_time"] = r.exit_time;
  return j;
}

json to_json(const FixedPointReport& r) {
  json j{{"status", to_string(r.status)},
         {"alternations", r.alternations},
         {"residuals", r.residuals},
         {"in_b_el", r.in_b_el},
         {"in_b_nuc", r.in_b_nuc},
         {"max_electron_distance", r.max_electron_distance},
         {"message", r.message},
         {"region", {{"alpha", r.region.alpha}, {"gamma", r.region.gamma}, {"tau", r.region.tau}}}};
  // delta is infinite with fewer than two nuclei
  if (std::isfinite(r.region.delta)) j["region"]["delta"] = r.region.delta;
  j["nuclear_reports"] = json::array();
  for (const auto& n : r.nuclear_reports) j["nuclear_reports"].push_back(to_json(n));
  return j;
}

void require_finite_json(const json& j) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) throw NonFiniteError("report holds a non-finite number");
  if (j.is_structured()) {
    for (const auto& v : j) require_finite_json(v);
  }
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace ksnd::cli
