#pragma once

#include <vector>

#include "ksnd/dynamics.hpp"

namespace ksnd {

struct EnergyBreakdown {
  double T_nuclear = 0.0;
  double T_electronic = 0.0;
  double T = 0.0;
  double W = 0.0;
  double U = 0.0;
  double E_X = 0.0;
  double E = 0.0;
};

/// E = T + W + U + E_X. The electronic kinetic term is evaluated as
/// <psi, -Delta psi>/2 with the same |k|^2 multiplier as the propagator.
/// U = (1/2) <rho, v_H[rho]> with the zero-mode-gauged v_H (zero when the
/// Hartree term is switched off); E_X = (lambda/q) ||rho||_q^q.
EnergyBreakdown total_energy(const OrbitalSet& psi, const NuclearState& nuc, const Physics& physics);

struct ConservationBudget {
  double energy = 1e-4;
  double rho_l1 = 1e-10;
  double orbital_l2 = 1e-10;
};

struct ConservationReport {
  std::vector<double> times;
  std::vector<EnergyBreakdown> energies;
  std::vector<double> rho_l1;
  /// max_t |E(t) - E(0)| / |E(0)| (absolute when E(0) == 0)
  double energy_drift = 0.0;
  double rho_l1_drift = 0.0;
  std::vector<double> orbital_l2_drift;
  bool energy_ok = true;
  bool rho_l1_ok = true;
  bool orbital_l2_ok = true;
};

double relative_drift(const std::vector<double>& series);

/// Uses every orbital snapshot of the record together with the nuclear state
/// at the same sample. Masses and charges come from `nuc0`.
ConservationReport conservation_check(const TrajectoryRecord& traj, const NuclearState& nuc0, const Physics& physics,
                                      const ConservationBudget& budget = {});

}  // namespace ksnd
