#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ksnd/dynamics.hpp"

namespace ksnd {

struct OracleResult {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::map<std::string, double> details;
};

/// Periodic potential of a unit point charge at the origin with a uniform
/// neutralising background and zero mean, minus 1/|r|, evaluated at a
/// minimum-image displacement (Ewald split with parameter eta).
RealField ewald_image_correction(const GridPtr& grid, const Vec3& center, double eta);

/// Normalised Gaussian density of standard deviation `width` at the box
/// centre. The periodic Hartree potential, with the analytic image and
/// background correction removed, is compared to erf(r/(width sqrt 2))/r for
/// |r| <= radius; error is the max relative deviation.
OracleResult hartree_erf_oracle(const GridPtr& grid, double width, double radius, double tol = 1e-6);

/// Free evolution of a Gaussian packet: density standard deviation
/// width * sqrt(1 + (t / (2 width^2))^2) after time t.
OracleResult free_gaussian_oracle(const GridPtr& grid, double width, double time, double dt, double tol = 1e-6);

/// Central differences of W with respect to each nuclear coordinate against
/// -m_k a_k on `configs` random configurations (three nuclei, random density).
/// details["pair_ratio"] is |grad of the pair term| / |m a2| averaged over
/// nuclei, 1 for newton_consistent and 2 for paper_literal.
OracleResult force_energy_oracle(const GridPtr& grid, std::size_t configs, std::uint64_t seed,
                                 ForceConvention convention, double step = 1e-4, double tol = 1e-5);

/// Two protons at separation `separation`, rho = 0: solve_nuclear at dt
/// against velocity Verlet at dt/100 over tau; error is the max position gap.
OracleResult two_proton_oracle(double box_length, double separation, double dt, double tau, double tol = 1e-6);

}  // namespace ksnd
