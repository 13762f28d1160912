#include "ksnd/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ksnd/error.hpp"
#include "ksnd/norms.hpp"

namespace ksnd {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

struct Evaluator {
  const AdmissibilityConstants& c;
  double v0;
  double psi0;
  double delta;
  const ExchangeParams& xp;
  std::size_t n_orbitals;

  AdmissibilityReport at(double tau) const {
    AdmissibilityReport r;
    r.tau = tau;
    r.v0 = v0;
    r.psi0_h2 = psi0;
    r.delta = delta;
    r.gamma = 2.0 * v0 + 1.0;
    r.B = std::pow(*c.A, 1.0 + *c.C * tau);
    r.alpha = 2.0 * r.B * psi0;
    const double s = r.alpha + psi0;
    const double accel = *c.C1 * s * s + *c.C2;
    const double lip = *c.lipschitz_scale * combined_bound_function(s, n_orbitals, xp);
    const auto add = [&](const char* name, double lhs, double rhs) {
      r.conditions.push_back({name, lhs, rhs, lhs < rhs});
    };
    add("A1", std::max(tau, tau * tau) * (v0 + accel), std::min(1.0, delta));
    add("A1a", v0 * tau + accel * tau * tau, delta);
    add("A1b", accel * tau * tau, 1.0);
    add("A1c", tau * accel, 1.0 + v0);
    add("A2", tau * r.B * (2.0 * r.B + 1.0) / (r.B - 1.0) * lip, 1.0);
    add("A2a", tau * r.B * lip, 1.0);
    r.admissible = std::all_of(r.conditions.begin(), r.conditions.end(), [](const auto& x) { return x.holds; });
    return r;
  }
};

}  // namespace

std::vector<std::string> AdmissibilityConstants::missing() const {
  std::vector<std::string> out;
  if (!A) out.emplace_back("A (propagator-norm probe)");
  if (!C) out.emplace_back("C (propagator-norm probe)");
  if (!C1) out.emplace_back("C1 (forces probe)");
  if (!C2) out.emplace_back("C2 (internuclear constant)");
  if (!lipschitz_scale) out.emplace_back("lipschitz_scale (exchange probe, estimate F)");
  return out;
}

const Condition& AdmissibilityReport::get(const std::string& name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return c;
  }
  throw InvalidInput("admissibility report has no condition " + name);
}

AdmissibilityReport admissibility_check(const OrbitalSet& psi0, const NuclearState& nuc0, const ExchangeParams& xp,
                                        double tau, const AdmissibilityConstants& constants,
                                        const AdmissibilityOptions& options) {
  const auto missing = constants.missing();
  if (!missing.empty()) {
    std::string msg = "admissibility: missing constants, probe first:";
    for (const auto& m : missing) msg += " " + m + ";";
    throw InvalidInput(msg);
  }
  if (!(*constants.A > 1.0)) throw InvalidInput("admissibility: A must exceed 1");
  if (!(*constants.C > 2.0)) throw InvalidInput("admissibility: C must exceed 2");
  if (*constants.C1 < 0.0 || *constants.C2 < 0.0 || *constants.lipschitz_scale < 0.0) {
    throw InvalidInput("admissibility: C1, C2 and lipschitz_scale must be nonnegative");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidInput("admissibility: tau must be positive");
  if (!(options.tau_max > 0.0)) throw InvalidInput("admissibility: tau_max must be positive");
  if (psi0.empty()) throw InvalidInput("admissibility: need at least one orbital");
  nuc0.validate();

  double delta = 0.25 * min_pair_distance(nuc0.positions);
  if (options.delta_override) delta = *options.delta_override;
  if (delta < 0.0) throw InvalidInput("admissibility: delta must be nonnegative");

  const Evaluator ev{constants, stacked_norm(nuc0.velocities), h2_norm(psi0), delta, xp, psi0.size()};
  AdmissibilityReport rep = ev.at(tau);

  // Bisection for the largest admissible tau, assuming monotonicity in tau.
  if (ev.at(options.tau_max).admissible) {
    rep.tau_star = options.tau_max;
  } else {
    double lo = 0.0;
    double hi = options.tau_max;
    for (int i = 0; i < options.bisection_steps; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= 0.0) break;
      if (ev.at(mid).admissible) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    rep.tau_star = lo;
  }
  rep.provenance = constants.provenance;
  if (options.delta_override) rep.provenance["delta"] = "configured override " + fmt(delta);
  return rep;
}

double internuclear_constant(const NuclearState& nuc0, double delta) {
  if (nuc0.size() < 2) return 0.0;
  if (!(delta > 0.0)) throw InvalidInput("internuclear constant: delta must be positive");
  const double d = 2.0 * delta;
  double out = 0.0;
  for (std::size_t k = 0; k < nuc0.size(); ++k) {
    double zsum = 0.0;
    for (std::size_t l = 0; l < nuc0.size(); ++l) {
      if (l != k) zsum += nuc0.charges[l];
    }
    const double ratio = nuc0.charges[k] / nuc0.masses[k];
    out = std::max(out, ratio * std::max(zsum / (d * d), 4.0 * zsum / (d * d * d)));
  }
  return out;
}

AdmissibilityConstants constants_from_probes(const NuclearState& nuc0, const ProbeReport& forces,
                                             const ProbeReport& exchange, const PropagatorNormReport& propagator,
                                             double margin) {
  AdmissibilityConstants c;
  c.A = propagator.A;
  c.C = propagator.C;
  c.provenance["A"] = "probed: " + propagator.provenance;
  c.provenance["C"] = "probed: " + propagator.provenance;

  double zm = 0.0;
  for (std::size_t k = 0; k < nuc0.size(); ++k) zm = std::max(zm, nuc0.charges[k] / nuc0.masses[k]);
  const double fc = std::max(forces.get("force-value").split.calibrated, forces.get("force-derivative").split.calibrated);
  c.C1 = zm * margin * fc;
  c.provenance["C1"] = "probed: max z/m x " + fmt(margin) + " x force ratio " + fmt(fc) + " (" + forces.provenance + ")";

  const double delta = 0.25 * min_pair_distance(nuc0.positions);
  c.C2 = std::isfinite(delta) ? internuclear_constant(nuc0, delta) : 0.0;
  c.provenance["C2"] = "computed from initial geometry, delta " + fmt(delta);

  const double lc = exchange.get("F").split.calibrated;
  c.lipschitz_scale = margin * lc;
  c.provenance["lipschitz_scale"] = "probed: " + fmt(margin) + " x F ratio " + fmt(lc) + " (" + exchange.provenance + ")";
  return c;
}

}  // namespace ksnd
