#pragma once

#include <string>
#include <vector>

#include "ksnd/field.hpp"
#include "ksnd/vec3.hpp"

namespace ksnd {

/// M nuclei in Hartree atomic units.
struct NuclearState {
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  std::vector<double> masses;
  std::vector<int> charges;

  std::size_t size() const { return positions.size(); }
  /// Throws InvalidInput on inconsistent sizes, non-positive masses, charges
  /// below one, non-finite entries or coincident positions.
  void validate() const;
};

/// Smallest pairwise distance (open-space metric); +inf when M < 2.
double min_pair_distance(const std::vector<Vec3>& positions);

struct ExchangeParams {
  double lambda = 0.0;
  double q = 3.5;
  double epsilon = 0.0;

  /// True when q < 7/2, where the existence theory gives no guarantee.
  bool below_threshold() const { return q < 3.5; }
  void validate() const;
};

enum class ForceConvention { newton_consistent, paper_literal };

std::string to_string(ForceConvention c);
ForceConvention force_convention_from_string(const std::string& s);

/// Everything the electron and nuclear right-hand sides depend on.
struct Physics {
  ExchangeParams exchange;
  bool hartree = true;
  ForceConvention convention = ForceConvention::newton_consistent;
};

using OrbitalSet = std::vector<ComplexField>;

RealField density(const OrbitalSet& psi);

/// Softened Coulomb attraction -sum_k z_k / sqrt(|r - x_k|^2 + eps^2) with
/// minimum-image distances. eps = 0 with a nucleus on a node is rejected.
RealField external_potential(const GridPtr& grid, const std::vector<Vec3>& positions,
                             const std::vector<int>& charges, double eps);
RealField external_potential(const GridPtr& grid, const NuclearState& nuc, double eps);

RealField hartree_potential(const RealField& rho);

/// lambda * rho^(q-1), zero where rho == 0. Negatives down to -1e-12 are
/// clamped; anything lower is rejected.
RealField exchange_potential(const RealField& rho, const ExchangeParams& xp);

/// v_H[rho] + v_X[rho] (v_H omitted when physics.hartree is false).
RealField mean_field_potential(const RealField& rho, const Physics& physics);

OrbitalSet apply_hamiltonian(const NuclearState& nuc, const OrbitalSet& psi, const Physics& physics);

/// a1 by direct softened quadrature:
/// (z_k/m_k) dV sum_r rho(r) (r - x_k) / (|r - x_k|^2 + eps^2)^{3/2}.
/// This is minus the x_k-gradient of the discrete <v[x], rho> divided by m_k.
std::vector<Vec3> electron_nuclear_accel(const RealField& rho, const NuclearState& nuc, double eps);
/// a1 from the spectral gradient of v_H[rho], trilinearly interpolated at x_k.
/// Unsoftened and periodic, so it differs from the quadrature route by the
/// softening and image corrections.
std::vector<Vec3> electron_nuclear_accel_spectral(const RealField& rho, const NuclearState& nuc);

/// a2 with minimum-image separations in a box of side `box_length`.
/// newton_consistent: (z_k/m_k) sum_l z_l (x_k - x_l)/|x_k - x_l|^3;
/// paper_literal carries an extra factor 1/2.
std::vector<Vec3> internuclear_accel(const NuclearState& nuc, ForceConvention convention, double box_length);

/// W = <v[x], rho> + 1/2 sum_{k != l} z_k z_l / |x_k - x_l|.
double interaction_energy(const RealField& rho, const NuclearState& nuc, double eps);
double nuclear_repulsion(const NuclearState& nuc, double box_length);

/// a1 + a2 for the given convention.
std::vector<Vec3> total_accel(const RealField& rho, const NuclearState& nuc, const Physics& physics);

/// Both sides of the force estimates for the pair functions
/// f_k^{ij} = -z_k grad G[psi_i, psi_j], with Delta G = -4 pi conj(psi_i) psi_j.
struct ForceBoundReport {
  /// max over pairs and probe points of |f| / (z ||grad psi_i|| ||grad psi_j||)
  double ratio_value = 0.0;
  /// max over pairs and probe points of |Df| / (z ||psi_i||_H2 ||psi_j||_H2)
  double ratio_derivative = 0.0;
  /// largest |Im f^{jj}| relative to |f^{jj}| over diagonal pairs
  double diagonal_imag_residue = 0.0;
  std::size_t evaluations = 0;
};

ForceBoundReport force_bound_check(const OrbitalSet& psi, const NuclearState& nuc);

}  // namespace ksnd
