#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ksnd/model.hpp"
#include "ksnd/probes.hpp"

namespace ksnd {

/// Constants entering the window-length conditions. Each one is either
/// configured or measured; `provenance` records which.
struct AdmissibilityConstants {
  /// Propagator bound B = A^{1 + C tau}, A > 1, C > 2.
  std::optional<double> A;
  std::optional<double> C;
  /// Nuclear acceleration constants: |a| <= C1 (alpha + ||psi0||)^2 + C2.
  std::optional<double> C1;
  std::optional<double> C2;
  /// Multiplier on Lscript(s) = sqrt(N) s^2 + |lambda| s^{2(q-1)}.
  std::optional<double> lipschitz_scale;
  std::map<std::string, std::string> provenance;

  /// Names of the constants still unset.
  std::vector<std::string> missing() const;
};

struct Condition {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

struct AdmissibilityReport {
  double tau = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  double B = 0.0;
  double v0 = 0.0;
  double psi0_h2 = 0.0;
  /// A1, A1a, A1b, A1c, A2, A2a.
  std::vector<Condition> conditions;
  bool admissible = false;
  /// Largest admissible tau found by bisection on (0, tau_max]; 0 if none.
  double tau_star = 0.0;
  std::map<std::string, std::string> provenance;

  const Condition& get(const std::string& name) const;
};

struct AdmissibilityOptions {
  double tau_max = 1.0;
  int bisection_steps = 60;
  /// Replaces delta = min pair distance / 4 when set.
  std::optional<double> delta_override;
};

/// Evaluates (A1), (A2) and the sub-conditions at `tau`. Every condition is
/// required to hold strictly. Throws InvalidInput listing the probes to run
/// when constants are missing.
AdmissibilityReport admissibility_check(const OrbitalSet& psi0, const NuclearState& nuc0, const ExchangeParams& xp,
                                        double tau, const AdmissibilityConstants& constants,
                                        const AdmissibilityOptions& options = {});

/// C2 = max_k (z_k/m_k) max( sum_l z_l / (2 delta)^2, 4 sum_l z_l / (2 delta)^3 ),
/// bounding a2 and its Lipschitz constant while nuclei stay 2 delta apart.
double internuclear_constant(const NuclearState& nuc0, double delta);

/// Assembles constants from measured probe outputs. The force and Lscript
/// constants are the calibrated ratios times `margin`.
AdmissibilityConstants constants_from_probes(const NuclearState& nuc0, const ProbeReport& forces,
                                             const ProbeReport& exchange, const PropagatorNormReport& propagator,
                                             double margin = 2.0);

}  // namespace ksnd
