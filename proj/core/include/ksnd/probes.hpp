#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ksnd/dynamics.hpp"
#include "ksnd/states.hpp"

namespace ksnd {

/// Split-sample protocol: the first `calibrate` ratios fix R = max, the rest
/// are checked against margin * R.
struct SplitSample {
  std::size_t calibrate = 0;
  std::size_t asserted = 0;
  double calibrated = 0.0;
  double margin = 2.0;
  double max_asserted = 0.0;
  std::size_t violations = 0;
  bool all_finite = true;

  bool pass() const { return all_finite && violations == 0; }
};

SplitSample split_sample(const std::vector<double>& ratios, std::size_t calibrate, double margin = 2.0);

/// One probed inequality: left side over right side (unit constant) per sample.
struct InequalityResult {
  std::string name;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> ratios;
  SplitSample split;
  double max_ratio = 0.0;
};

struct ProbeReport {
  std::string probe;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::string provenance;
  std::vector<InequalityResult> inequalities;
  /// Extra scalar outputs that are not split-sample checked.
  std::map<std::string, double> diagnostics;

  bool pass() const;
  const InequalityResult& get(const std::string& name) const;
};

struct ProbeSettings {
  std::size_t samples = 1000;
  /// First `calibrate` samples calibrate; defaults to half.
  std::size_t calibrate = 0;
  double margin = 2.0;
  std::uint64_t seed = 0;
  std::size_t orbitals = 1;
  /// H2 radius of the random states.
  double radius = 1.0;
  double cutoff_fraction = 0.35;
};

/// A random pair (psi, psi') with psi' = psi + eta xi, eta spread over three
/// decades below `radius`.
struct StatePair {
  OrbitalSet a;
  OrbitalSet b;
};
StatePair random_pair(const GridPtr& grid, Rng& rng, const ProbeSettings& ps);

/// Laplacian of v psi evaluated by the product rule at the nodes, with the
/// derivatives of v supplied pointwise.
ComplexField collocated_product_laplacian(const RealField& v, const std::array<RealField, 3>& grad_v,
                                          const RealField& lap_v, const ComplexField& psi);

/// H2 norm of (v_X[rho] psi) - (v_X[rho'] psi') with the exchange factor
/// differentiated by the chain rule at the nodes (the spectral derivative of
/// rho^(q-1) on a grid hides the small-density singularity).
double exchange_difference_h2(const OrbitalSet& a, const OrbitalSet& b, const ExchangeParams& xp);
/// Same for v_H[rho] psi - v_H[rho'] psi'.
double hartree_difference_h2(const OrbitalSet& a, const OrbitalSet& b);

/// Surrogates for the unspecified non-decreasing bound functions:
/// L(s) = |lambda| s^{2(q-1)} for the exchange term and
/// Lscript(s) = sqrt(N) s^2 + |lambda| s^{2(q-1)} for v_HX.
double exchange_bound_function(double s, const ExchangeParams& xp);
double combined_bound_function(double s, std::size_t n_orbitals, const ExchangeParams& xp);

/// (A), (B), (C).
ProbeReport lipschitz_probe_hartree(const GridPtr& grid, const ProbeSettings& ps);
/// (D) in L^p, (E), (F), (G).
ProbeReport lipschitz_probe_exchange(const GridPtr& grid, const ExchangeParams& xp, const ProbeSettings& ps,
                                     double lp = 2.0);

/// Near-vacuum sweep for the (E) ratio: psi = sin(2 pi x / L) + i sqrt(m)
/// with min rho = m, perturbed by `perturbation` times a random unit-H2 field.
struct ThresholdSweep {
  double q = 0.0;
  std::vector<double> min_density;
  std::vector<double> ratios;
  /// ratios.back() / ratios.front()
  double growth = 0.0;
  /// max / min over the sweep
  double spread = 0.0;
};
ThresholdSweep exchange_threshold_sweep(const GridPtr& grid, double q, const std::vector<double>& min_densities,
                                        std::uint64_t seed, double perturbation = 1e-5);

/// Pointwise mean-value estimates. For alpha = 1/2 the sharp ratio
/// ||psi| - |psi'|| / |psi - psi'| is reported (its supremum is exactly 1);
/// otherwise |rho^a - rho'^a| / ((||rho||_inf^{a-1/2} + ||rho'||_inf^{a-1/2}) |psi - psi'|).
/// Each pair contributes its worst-point ratio. Exponents below 1/2 are rejected.
InequalityResult mve_pair_ratios(const std::vector<StatePair>& pairs, double alpha);
/// Gradient version with the Q1, Q2, Q3 weights; beta below 3/2 is rejected.
InequalityResult mve_gradient_pair_ratios(const std::vector<StatePair>& pairs, double beta);

ProbeReport mve_probe(const GridPtr& grid, const std::vector<double>& alphas, const std::vector<double>& betas,
                      const ProbeSettings& ps);

/// Force estimates over random states (see force_bound_check).
ProbeReport force_probe(const GridPtr& grid, const ProbeSettings& ps);

/// Empirical H2 operator norm of the linear propagator along a nuclear
/// trajectory.
struct PropagatorNormReport {
  std::vector<double> thetas;
  std::vector<double> amplification;
  /// log amp ~ a + b Theta; A = e^a, C = b / a.
  double fit_a = 0.0;
  double fit_b = 0.0;
  double A = 1.0;
  double C = 2.0;
  bool clamped = false;
  double max_l2_defect = 0.0;
  std::string provenance;
};

/// `nuc_traj` holds positions at multiples of s.dt over one window of
/// s.window_tau; amplification at Theta is the max over fields and samples
/// t <= Theta of ||U(t,0) phi||_H2 / ||phi||_H2. When the fit gives A below
/// 1 + a_floor or C <= 2, A is raised to 1 + a_floor and C to the smallest
/// value above 2 for which A^{1 + C Theta} covers every measured point.
PropagatorNormReport propagator_norm_probe(const TrajectoryRecord& nuc_traj, const NuclearState& nuc0,
                                           const GridPtr& grid, double epsilon, const SolverSettings& s,
                                           const std::vector<double>& thetas, std::size_t n_fields,
                                           std::uint64_t seed, double a_floor = 1e-2);

}  // namespace ksnd
