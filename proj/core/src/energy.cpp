#include "ksnd/energy.hpp"

#include <algorithm>
#include <cmath>

#include "ksnd/error.hpp"
#include "ksnd/spectral.hpp"

namespace ksnd {

namespace {

double kinetic(const ComplexField& f) {
  const auto c = spectral::to_fourier(f);
  const auto k2 = f.grid().k_squared();
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += k2[i] * std::norm(c[i]);
  return 0.5 * s * f.grid().cell_volume() / static_cast<double>(c.size());
}

}  // namespace

EnergyBreakdown total_energy(const OrbitalSet& psi, const NuclearState& nuc, const Physics& physics) {
  if (psi.empty()) throw InvalidInput("total_energy: empty orbital set");
  EnergyBreakdown e;
  for (std::size_t k = 0; k < nuc.size(); ++k) e.T_nuclear += 0.5 * nuc.masses[k] * dot(nuc.velocities[k], nuc.velocities[k]);
  for (const auto& o : psi) e.T_electronic += kinetic(o);
  e.T = e.T_nuclear + e.T_electronic;
  const RealField rho = density(psi);
  e.W = interaction_energy(rho, nuc, physics.exchange.epsilon);
  const double dv = rho.grid().cell_volume();
  if (physics.hartree) {
    const RealField vh = hartree_potential(rho);
    double s = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) s += rho[i] * vh[i];
    e.U = 0.5 * s * dv;
  }
  const ExchangeParams& xp = physics.exchange;
  if (xp.lambda != 0.0) {
    double s = 0.0;
    for (double r : rho.values()) s += r > 0.0 ? std::pow(r, xp.q) : 0.0;
    e.E_X = xp.lambda / xp.q * s * dv;
  }
  e.E = e.T + e.W + e.U + e.E_X;
  return e;
}

double relative_drift(const std::vector<double>& series) {
  if (series.empty()) return 0.0;
  const double ref = series.front();
  double worst = 0.0;
  for (double v : series) worst = std::max(worst, std::abs(v - ref));
  return ref != 0.0 ? worst / std::abs(ref) : worst;
}

ConservationReport conservation_check(const TrajectoryRecord& traj, const NuclearState& nuc0, const Physics& physics,
                                      const ConservationBudget& budget) {
  ConservationReport rep;
  if (traj.snapshots.empty()) throw InvalidInput("conservation_check: trajectory has no orbital snapshots");
  const std::size_t norb = traj.snapshots.front().size();
  std::vector<double> e_series;
  std::vector<std::vector<double>> l2(norb);
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const std::size_t n = traj.snapshot_index[i];
    NuclearState nuc = nuc0;
    if (traj.has_nuclear()) {
      nuc.positions = traj.positions[n];
      nuc.velocities = traj.velocities[n];
    }
    const OrbitalSet& psi = traj.snapshots[i];
    rep.times.push_back(traj.times[n]);
    rep.energies.push_back(total_energy(psi, nuc, physics));
    e_series.push_back(rep.energies.back().E);
    rep.rho_l1.push_back(spectral::integrate(density(psi)));
    for (std::size_t j = 0; j < norb; ++j) l2[j].push_back(spectral::l2_norm(psi[j]));
  }
  rep.energy_drift = relative_drift(e_series);
  rep.rho_l1_drift = relative_drift(rep.rho_l1);
  for (const auto& s : l2) rep.orbital_l2_drift.push_back(relative_drift(s));
  rep.energy_ok = rep.energy_drift <= budget.energy;
  rep.rho_l1_ok = rep.rho_l1_drift <= budget.rho_l1;
  rep.orbital_l2_ok = std::all_of(rep.orbital_l2_drift.begin(), rep.orbital_l2_drift.end(),
                                  [&](double d) { return d <= budget.orbital_l2; });
  return rep;
}

}  // namespace ksnd
