#pragma once

#include <cstdint>
#include <vector>

#include "ksnd/dynamics.hpp"

namespace ksnd {

/// h(t) = [|x - x'| + sum_j ||psi_j - psi'_j||_{3,inf}]^p on the common
/// snapshot times of two runs.
struct UniquenessReport {
  double p = 3.0;
  std::vector<double> times;
  std::vector<double> nuclear_gap;
  std::vector<double> electron_gap;
  std::vector<double> h;
  double max_h = 0.0;
  /// Least-squares fit log h = intercept + rate t over samples with h > 0.
  bool fitted = false;
  double rate = 0.0;
  double intercept = 0.0;

  double end_gap() const { return nuclear_gap.back() + electron_gap.back(); }
  bool identical(double tol = 1e-20) const { return max_h <= tol; }
};

/// Both records must carry nuclear positions and snapshots at identical
/// times; p must exceed 2.
UniquenessReport uniqueness_probe(const TrajectoryRecord& a, const TrajectoryRecord& b, double p);

/// Bitwise equality of every stored sample of two records.
bool bit_identical(const TrajectoryRecord& a, const TrajectoryRecord& b);

struct PerturbationSweep {
  std::vector<double> sizes;
  std::vector<UniquenessReport> reports;
  /// end_gap(size[i+1]) / end_gap(size[i]) and the same for h.
  std::vector<double> gap_ratios;
  std::vector<double> h_ratios;
};

/// Runs the unperturbed problem and one run per size s with
/// psi0_j + s xi_j (xi_j random band-limited, unit L2), one snapshot per window.
PerturbationSweep perturbation_sweep(const OrbitalSet& psi0, const NuclearState& nuc0, const Physics& physics,
                                     const SolverSettings& s, double total_time, const std::vector<double>& sizes,
                                     std::uint64_t seed, double p);

}  // namespace ksnd
