#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksnd/model.hpp"

namespace ksnd {

struct SolverSettings {
  double dt = 1e-3;
  double picard_tol = 1e-10;
  int max_picard_iters = 50;
  double window_tau = 0.1;
  /// Orbital snapshots are kept every `snapshot_stride` steps (and at the end).
  std::size_t snapshot_stride = 1;
  /// Estimate of the H2 operator bound of the linear propagator; sets
  /// alpha = 2 * bound * ||psi0||_H2 for the electronic feasibility report.
  double propagator_bound = 1.0;

  void validate() const;
  /// Number of dt steps in one window; throws unless dt divides window_tau.
  std::size_t steps_per_window() const;
};

/// Radii of the feasible balls around the initial data of one window.
struct FeasibilityRegion {
  double alpha = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double tau = 0.0;

  /// delta = min pair distance / 4 (infinite for M < 2), gamma = 2|v0| + 1,
  /// alpha = 2 * propagator_bound * ||psi0||_H2.
  static FeasibilityRegion from_initial(const OrbitalSet& psi0, const NuclearState& nuc0, const SolverSettings& s);
};

/// Time samples of one solve. Nuclear and electronic parts are filled by the
/// solver that produced them; absent parts are empty vectors.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<std::vector<Vec3>> positions;
  std::vector<std::vector<Vec3>> velocities;
  std::vector<std::vector<Vec3>> accelerations;
  std::vector<RealField> densities;
  std::vector<std::vector<double>> orbital_norms;
  /// Sample indices (into `times`) of the stored orbital snapshots.
  std::vector<std::size_t> snapshot_index;
  std::vector<OrbitalSet> snapshots;

  std::size_t size() const { return times.size(); }
  /// Throws InvalidInput unless times start at `t0`, increase strictly and
  /// every populated per-sample vector has one entry per time.
  void validate(double t0 = 0.0) const;
  bool has_nuclear() const { return !positions.empty(); }
};

enum class SolveStatus { converged, diverged, max_iters, feasibility, non_finite };
std::string to_string(SolveStatus s);

struct ContractionReport {
  SolveStatus status = SolveStatus::converged;
  int iterations = 0;
  std::vector<double> residuals;
  std::vector<double> ratios;
  double exit_time = std::numeric_limits<double>::quiet_NaN();
  std::string message;
  bool in_feasible_region = true;

  bool ok() const { return status == SolveStatus::converged; }
};

/// Strang split-step evolution against a prescribed nuclear trajectory whose
/// positions are given at t0 + n dt. Densities and orbital norms are stored
/// at every step, orbital snapshots every settings.snapshot_stride steps.
TrajectoryRecord solve_electron(const TrajectoryRecord& nuc_traj, const OrbitalSet& psi0, const NuclearState& nuc0,
                                const Physics& physics, const SolverSettings& s);

/// Trajectory-level Duhamel iteration of the electron map with trapezoid
/// quadrature and the linear kinetic-plus-external split propagator.
struct DuhamelResult {
  TrajectoryRecord trajectory;
  ContractionReport report;
};
DuhamelResult duhamel_iterate(const TrajectoryRecord& nuc_traj, const OrbitalSet& psi0, const NuclearState& nuc0,
                              const Physics& physics, const SolverSettings& s);

/// Ballistic positions x0 + v0 (t - t0) at the sample times.
TrajectoryRecord ballistic_trajectory(const NuclearState& nuc0, const std::vector<double>& times);

/// Density samples driving the nuclear solvers; an empty list means rho = 0.
struct DensityTrack {
  std::vector<double> times;
  std::vector<RealField> densities;
  double box_length = 0.0;
};

DensityTrack density_track(const TrajectoryRecord& electrons, double box_length);
/// Sample times t0 + n dt of one window with no density (rho = 0).
DensityTrack zero_density(const SolverSettings& s, double box_length, double t0 = 0.0);

/// Optional synthetic acceleration replacing the model force (tests use this
/// for constant-acceleration oracles). Arguments: sample index, positions.
using AccelOverride = std::function<std::vector<Vec3>(std::size_t, const std::vector<Vec3>&)>;

struct NuclearResult {
  TrajectoryRecord trajectory;
  ContractionReport report;
};

/// Picard iteration of x -> x0 + v0 t + int_0^t (t - s) a(s, x(s)) ds with
/// trapezoid quadrature. Starts from the ballistic guess unless
/// `initial_positions` (one entry per sample) is given.
NuclearResult solve_nuclear(const DensityTrack& rho, const NuclearState& nuc0, const Physics& physics,
                            const SolverSettings& s, const AccelOverride& accel = {},
                            const std::vector<std::vector<Vec3>>& initial_positions = {});

/// Velocity Verlet on the same sample times.
TrajectoryRecord verlet_nuclear(const DensityTrack& rho, const NuclearState& nuc0, const Physics& physics,
                                const SolverSettings& s, const AccelOverride& accel = {});

struct FixedPointReport {
  SolveStatus status = SolveStatus::converged;
  int alternations = 0;
  std::vector<double> residuals;
  std::vector<ContractionReport> nuclear_reports;
  FeasibilityRegion region;
  bool in_b_el = true;
  bool in_b_nuc = true;
  double max_electron_distance = 0.0;
  std::string message;

  bool ok() const { return status == SolveStatus::converged; }
};

struct CoupledResult {
  TrajectoryRecord trajectory;
  FixedPointReport report;
};

/// Alternates solve_electron and solve_nuclear over one window [t0, t0 + tau]
/// until the nuclear trajectory changes by less than picard_tol.
CoupledResult coupled_step(const OrbitalSet& psi0, const NuclearState& nuc0, const Physics& physics,
                           const SolverSettings& s, double t0 = 0.0);

/// Raised by run_simulation when a window fails.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(std::size_t window, FixedPointReport report);
  std::size_t window() const { return window_; }
  const FixedPointReport& report() const { return report_; }

 private:
  std::size_t window_;
  FixedPointReport report_;
};

struct SimulationResult {
  /// Samples every `sample_stride` global steps plus the final time, with
  /// nuclear state, orbital norms and orbital snapshots.
  TrajectoryRecord record;
  std::vector<FixedPointReport> windows;
  OrbitalSet final_orbitals;
  NuclearState final_nuclei;
};

/// Called once per recorded sample with (time, orbitals, nuclei).
using SampleObserver = std::function<void(double, const OrbitalSet&, const NuclearState&)>;

/// Chains coupled windows from t = 0 to total_time. When `keep_snapshots` is
/// false the record carries nuclear data and norms only.
SimulationResult run_simulation(const OrbitalSet& psi0, const NuclearState& nuc0, const Physics& physics,
                                const SolverSettings& s, double total_time, std::size_t sample_stride,
                                const SampleObserver& observer = {}, bool keep_snapshots = true);

}  // namespace ksnd
