#include "ksnd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ksnd/error.hpp"
#include "ksnd/norms.hpp"
#include "ksnd/parallel.hpp"
#include "ksnd/spectral.hpp"

namespace ksnd {

namespace {

constexpr int kDivergenceStreak = 3;

std::vector<double> window_times(double t0, double dt, std::size_t steps) {
  std::vector<double> t(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) t[n] = t0 + static_cast<double>(n) * dt;
  return t;
}

std::vector<Vec3> midpoint(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  std::vector<Vec3> m(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) m[k] = 0.5 * (a[k] + b[k]);
  return m;
}

std::vector<double> orbital_norms(const OrbitalSet& psi) {
  std::vector<double> n(psi.size());
  for (std::size_t j = 0; j < psi.size(); ++j) n[j] = spectral::l2_norm(psi[j]);
  return n;
}

// exp(-i dt v) per grid point.
std::vector<Complex> phase_factors(const RealField& v, double dt) {
  std::vector<Complex> ph(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = -dt * v[i];
    ph[i] = Complex(std::cos(a), std::sin(a));
  }
  return ph;
}

void multiply(ComplexField& f, const std::vector<Complex>& ph) {
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= ph[i];
}

RealField external_at(const GridPtr& grid, const std::vector<Vec3>& x, const NuclearState& nuc0, double eps) {
  if (x.empty()) return RealField(grid);
  return external_potential(grid, x, nuc0.charges, eps);
}

void require_nuclear_samples(const TrajectoryRecord& nuc_traj, std::size_t steps, std::size_t m) {
  if (nuc_traj.positions.size() != steps + 1 || nuc_traj.times.size() != steps + 1) {
    throw InvalidInput("nuclear trajectory must carry " + std::to_string(steps + 1) + " samples for this window");
  }
  for (const auto& p : nuc_traj.positions) {
    if (p.size() != m) throw InvalidInput("nuclear trajectory has the wrong number of nuclei");
  }
}

void require_orbitals(const OrbitalSet& psi0) {
  if (psi0.empty()) throw InvalidInput("orbital set is empty");
  for (const auto& o : psi0) {
    require_same_grid(psi0.front().grid(), o.grid());
    o.require_finite("initial orbital");
  }
}

// Tracks residual ratios and applies the shared stopping rule.
struct Stopping {
  ContractionReport& rep;
  double tol;
  int streak = 0;

  // Returns true when iteration should stop.
  bool push(double d) {
    rep.residuals.push_back(d);
    rep.iterations = static_cast<int>(rep.residuals.size());
    if (!std::isfinite(d)) {
      rep.status = SolveStatus::non_finite;
      rep.message = "non-finite residual";
      return true;
    }
    if (rep.residuals.size() >= 2) {
      const double prev = rep.residuals[rep.residuals.size() - 2];
      const double r = prev > 0.0 ? d / prev : 0.0;
      rep.ratios.push_back(r);
      streak = r > 1.0 ? streak + 1 : 0;
    }
    if (d < tol) {
      rep.status = SolveStatus::converged;
      return true;
    }
    if (streak >= kDivergenceStreak) {
      rep.status = SolveStatus::diverged;
      rep.message = "residual grew for " + std::to_string(kDivergenceStreak) + " consecutive iterations";
      return true;
    }
    return false;
  }
};

}  // namespace

void SolverSettings::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("time.dt must be positive");
  if (!(window_tau >= dt)) throw InvalidInput("time.window_tau must be >= time.dt");
  if (!(picard_tol > 0.0)) throw InvalidInput("picard.tol must be positive");
  if (max_picard_iters < 1) throw InvalidInput("picard.max_iters must be >= 1");
  if (snapshot_stride < 1) throw InvalidInput("snapshot stride must be >= 1");
  if (!(propagator_bound >= 1.0)) throw InvalidInput("propagator bound must be >= 1");
  (void)steps_per_window();
}

std::size_t SolverSettings::steps_per_window() const {
  const double ratio = window_tau / dt;
  const double k = std::round(ratio);
  if (k < 1.0 || std::abs(ratio - k) > 1e-9 * k) {
    throw InvalidInput("time.window_tau must be an integer multiple of time.dt");
  }
  return static_cast<std::size_t>(k);
}

FeasibilityRegion FeasibilityRegion::from_initial(const OrbitalSet& psi0, const NuclearState& nuc0,
                                                  const SolverSettings& s) {
  FeasibilityRegion r;
  r.alpha = 2.0 * s.propagator_bound * h2_norm(psi0);
  r.delta = 0.25 * min_pair_distance(nuc0.positions);
  r.gamma = 2.0 * stacked_norm(nuc0.velocities) + 1.0;
  r.tau = s.window_tau;
  return r;
}

void TrajectoryRecord::validate(double t0) const {
  if (times.empty()) throw InvalidInput("trajectory has no samples");
  if (times.front() != t0) throw InvalidInput("trajectory does not start at the window origin");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidInput("trajectory times must increase strictly");
  }
  const auto check = [&](std::size_t n, const char* what) {
    if (n != 0 && n != times.size()) throw InvalidInput(std::string("trajectory ") + what + " count mismatch");
  };
  check(positions.size(), "positions");
  check(velocities.size(), "velocities");
  check(accelerations.size(), "accelerations");
  check(densities.size(), "densities");
  check(orbital_norms.size(), "orbital norms");
  if (snapshot_index.size() != snapshots.size()) throw InvalidInput("trajectory snapshot index mismatch");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::diverged: return "diverged";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::feasibility: return "feasibility";
    case SolveStatus::non_finite: return "non_finite";
  }
  return "unknown";
}

TrajectoryRecord solve_electron(const TrajectoryRecord& nuc_traj, const OrbitalSet& psi0, const NuclearState& nuc0,
                                const Physics& physics, const SolverSettings& s) {
  require_orbitals(psi0);
  const std::size_t steps = s.steps_per_window();
  require_nuclear_samples(nuc_traj, steps, nuc0.size());
  const GridPtr grid = psi0.front().grid_ptr();
  const spectral::FreePropagator half(grid, 0.5 * s.dt);

  TrajectoryRecord rec;
  rec.times = nuc_traj.times;
  OrbitalSet psi = psi0;
  rec.densities.push_back(density(psi));
  rec.orbital_norms.push_back(orbital_norms(psi));
  rec.snapshot_index.push_back(0);
  rec.snapshots.push_back(psi);

  for (std::size_t n = 0; n < steps; ++n) {
    parallel_for(psi.size(), [&](std::size_t j) { half.apply(psi[j]); });
    RealField v = mean_field_potential(density(psi), physics);
    v += external_at(grid, midpoint(nuc_traj.positions[n], nuc_traj.positions[n + 1]), nuc0, physics.exchange.epsilon);
    const auto ph = phase_factors(v, s.dt);
    parallel_for(psi.size(), [&](std::size_t j) {
      multiply(psi[j], ph);
      half.apply(psi[j]);
    });
    RealField rho = density(psi);
    if (!rho.all_finite()) {
      throw NonFiniteError("solve_electron: non-finite state at step " + std::to_string(n + 1));
    }
    rec.densities.push_back(std::move(rho));
    rec.orbital_norms.push_back(orbital_norms(psi));
    if ((n + 1) % s.snapshot_stride == 0 || n + 1 == steps) {
      rec.snapshot_index.push_back(n + 1);
      rec.snapshots.push_back(psi);
    }
  }
  return rec;
}

DuhamelResult duhamel_iterate(const TrajectoryRecord& nuc_traj, const OrbitalSet& psi0, const NuclearState& nuc0,
                              const Physics& physics, const SolverSettings& s) {
  require_orbitals(psi0);
  const std::size_t steps = s.steps_per_window();
  require_nuclear_samples(nuc_traj, steps, nuc0.size());
  const GridPtr grid = psi0.front().grid_ptr();
  const spectral::FreePropagator half(grid, 0.5 * s.dt);
  const std::size_t norb = psi0.size();

  std::vector<std::vector<Complex>> ext_phase(steps);
  for (std::size_t n = 0; n < steps; ++n) {
    ext_phase[n] = phase_factors(
        external_at(grid, midpoint(nuc_traj.positions[n], nuc_traj.positions[n + 1]), nuc0, physics.exchange.epsilon),
        s.dt);
  }
  const auto linear_step = [&](OrbitalSet& psi, std::size_t n) {
    parallel_for(norb, [&](std::size_t j) {
      half.apply(psi[j]);
      multiply(psi[j], ext_phase[n]);
      half.apply(psi[j]);
    });
  };
  // g = v_HX[rho] psi for one sample.
  const auto nonlinearity = [&](const OrbitalSet& psi) {
    const RealField v = mean_field_potential(density(psi), physics);
    OrbitalSet g = psi;
    for (auto& o : g) {
      for (std::size_t i = 0; i < o.size(); ++i) o[i] *= v[i];
    }
    return g;
  };
  const auto axpy = [](OrbitalSet& y, Complex a, const OrbitalSet& x) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      for (std::size_t i = 0; i < y[j].size(); ++i) y[j][i] += a * x[j][i];
    }
  };

  std::vector<OrbitalSet> traj(steps + 1);
  traj[0] = psi0;
  for (std::size_t n = 0; n < steps; ++n) {
    traj[n + 1] = traj[n];
    linear_step(traj[n + 1], n);
  }

  DuhamelResult out;
  ContractionReport& rep = out.report;
  rep.status = SolveStatus::max_iters;
  Stopping stop{rep, s.picard_tol};
  const Complex half_dt(0.0, -0.5 * s.dt);
  const Complex full_dt(0.0, -s.dt);
  for (int it = 0; it < s.max_picard_iters; ++it) {
    std::vector<OrbitalSet> next(steps + 1);
    next[0] = psi0;
    OrbitalSet g_prev = nonlinearity(traj[0]);
    OrbitalSet a = psi0;
    double d = 0.0;
    for (std::size_t n = 0; n < steps; ++n) {
      OrbitalSet b = n == 0 ? psi0 : a;
      axpy(b, n == 0 ? half_dt : full_dt, g_prev);
      linear_step(b, n);
      a = std::move(b);
      g_prev = nonlinearity(traj[n + 1]);
      next[n + 1] = a;
      axpy(next[n + 1], half_dt, g_prev);
      OrbitalSet diff = next[n + 1];
      axpy(diff, Complex(-1.0), traj[n + 1]);
      d = std::max(d, h2_norm(diff));
    }
    traj = std::move(next);
    if (stop.push(d)) break;
  }
  if (rep.status == SolveStatus::max_iters) {
    rep.message = "no convergence within " + std::to_string(s.max_picard_iters) + " iterations";
  }

  TrajectoryRecord& rec = out.trajectory;
  rec.times = nuc_traj.times;
  for (std::size_t n = 0; n <= steps; ++n) {
    rec.densities.push_back(density(traj[n]));
    rec.orbital_norms.push_back(orbital_norms(traj[n]));
    if (n % s.snapshot_stride == 0 || n == steps) {
      rec.snapshot_index.push_back(n);
      rec.snapshots.push_back(std::move(traj[n]));
    }
  }
  return out;
}

TrajectoryRecord ballistic_trajectory(const NuclearState& nuc0, const std::vector<double>& times) {
  TrajectoryRecord rec;
  rec.times = times;
  const double t0 = times.empty() ? 0.0 : times.front();
  for (double t : times) {
    std::vector<Vec3> x(nuc0.size());
    for (std::size_t k = 0; k < nuc0.size(); ++k) x[k] = nuc0.positions[k] + (t - t0) * nuc0.velocities[k];
    rec.positions.push_back(std::move(x));
    rec.velocities.push_back(nuc0.velocities);
    rec.accelerations.push_back(std::vector<Vec3>(nuc0.size(), Vec3{}));
  }
  return rec;
}

DensityTrack density_track(const TrajectoryRecord& electrons, double box_length) {
  return DensityTrack{electrons.times, electrons.densities, box_length};
}

DensityTrack zero_density(const SolverSettings& s, double box_length, double t0) {
  return DensityTrack{window_times(t0, s.dt, s.steps_per_window()), {}, box_length};
}

namespace {

struct AccelEvaluator {
  const DensityTrack& rho;
  const NuclearState& nuc0;
  const Physics& physics;
  const AccelOverride& override_fn;

  std::vector<Vec3> operator()(std::size_t n, const std::vector<Vec3>& x) const {
    if (override_fn) return override_fn(n, x);
    NuclearState nuc = nuc0;
    nuc.positions = x;
    if (rho.densities.empty()) return internuclear_accel(nuc, physics.convention, rho.box_length);
    return total_accel(rho.densities[n], nuc, physics);
  }
};

void require_track(const DensityTrack& rho, const SolverSettings& s) {
  const std::size_t steps = s.steps_per_window();
  if (rho.times.size() != steps + 1) throw InvalidInput("density track does not cover the window");
  if (!rho.densities.empty() && rho.densities.size() != rho.times.size()) {
    throw InvalidInput("density track: one density per sample required");
  }
}

}  // namespace

NuclearResult solve_nuclear(const DensityTrack& rho, const NuclearState& nuc0, const Physics& physics,
                            const SolverSettings& s, const AccelOverride& accel,
                            const std::vector<std::vector<Vec3>>& initial_positions) {
  nuc0.validate();
  require_track(rho, s);
  const std::size_t samples = rho.times.size();
  const std::size_t m = nuc0.size();
  const double t0 = rho.times.front();
  const AccelEvaluator eval{rho, nuc0, physics, accel};
  NuclearState start = nuc0;
  const FeasibilityRegion region = FeasibilityRegion::from_initial({}, nuc0, s);

  NuclearResult out;
  TrajectoryRecord& rec = out.trajectory;
  rec = ballistic_trajectory(nuc0, rho.times);
  if (!initial_positions.empty()) {
    if (initial_positions.size() != samples) throw InvalidInput("solve_nuclear: initial guess has wrong length");
    rec.positions = initial_positions;
  }
  ContractionReport& rep = out.report;
  rep.status = SolveStatus::max_iters;
  Stopping stop{rep, s.picard_tol};

  std::vector<std::vector<Vec3>> a(samples);
  for (int it = 0; it < s.max_picard_iters; ++it) {
    for (std::size_t n = 0; n < samples; ++n) a[n] = eval(n, rec.positions[n]);
    // Cumulative trapezoid sums S0 = int a, S1 = int sigma a (sigma from t0).
    std::vector<Vec3> s0(m, Vec3{});
    std::vector<Vec3> s1(m, Vec3{});
    double d = 0.0;
    double exit_time = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<Vec3>> x_new(samples), v_new(samples);
    for (std::size_t n = 0; n < samples; ++n) {
      const double tn = rho.times[n] - t0;
      if (n > 0) {
        const double h = rho.times[n] - rho.times[n - 1];
        const double tp = rho.times[n - 1] - t0;
        for (std::size_t k = 0; k < m; ++k) {
          s0[k] += (0.5 * h) * (a[n - 1][k] + a[n][k]);
          s1[k] += (0.5 * h) * (tp * a[n - 1][k] + tn * a[n][k]);
        }
      }
      x_new[n].resize(m);
      v_new[n].resize(m);
      for (std::size_t k = 0; k < m; ++k) {
        x_new[n][k] = nuc0.positions[k] + tn * nuc0.velocities[k] + tn * s0[k] - s1[k];
        v_new[n][k] = nuc0.velocities[k] + s0[k];
      }
      d = std::max(d, stacked_distance(x_new[n], rec.positions[n]));
      if (std::isnan(exit_time) && (stacked_distance(x_new[n], nuc0.positions) > region.delta ||
                                    stacked_norm(v_new[n]) > region.gamma)) {
        exit_time = rho.times[n];
      }
    }
    rec.positions = std::move(x_new);
    rec.velocities = std::move(v_new);
    if (!std::isnan(exit_time)) {
      rep.residuals.push_back(d);
      rep.iterations = static_cast<int>(rep.residuals.size());
      rep.status = SolveStatus::feasibility;
      rep.exit_time = exit_time;
      rep.in_feasible_region = false;
      std::ostringstream msg;
      msg << "iterate left the feasible nuclear region at t = " << exit_time;
      rep.message = msg.str();
      break;
    }
    if (stop.push(d)) break;
  }
  if (rep.status == SolveStatus::max_iters) {
    rep.message = "no convergence within " + std::to_string(s.max_picard_iters) + " iterations";
  }
  // Accelerations along the returned trajectory.
  for (std::size_t n = 0; n < samples; ++n) a[n] = eval(n, rec.positions[n]);
  rec.accelerations = std::move(a);
  return out;
}

TrajectoryRecord verlet_nuclear(const DensityTrack& rho, const NuclearState& nuc0, const Physics& physics,
                                const SolverSettings& s, const AccelOverride& accel) {
  nuc0.validate();
  require_track(rho, s);
  const std::size_t samples = rho.times.size();
  const std::size_t m = nuc0.size();
  const AccelEvaluator eval{rho, nuc0, physics, accel};
  TrajectoryRecord rec;
  rec.times = rho.times;
  std::vector<Vec3> x = nuc0.positions;
  std::vector<Vec3> v = nuc0.velocities;
  std::vector<Vec3> a = eval(0, x);
  rec.positions.push_back(x);
  rec.velocities.push_back(v);
  rec.accelerations.push_back(a);
  for (std::size_t n = 1; n < samples; ++n) {
    const double h = rho.times[n] - rho.times[n - 1];
    for (std::size_t k = 0; k < m; ++k) x[k] += h * v[k] + (0.5 * h * h) * a[k];
    const std::vector<Vec3> a_new = eval(n, x);
    for (std::size_t k = 0; k < m; ++k) v[k] += (0.5 * h) * (a[k] + a_new[k]);
    a = a_new;
    rec.positions.push_back(x);
    rec.velocities.push_back(v);
    rec.accelerations.push_back(a);
  }
  return rec;
}

CoupledResult coupled_step(const OrbitalSet& psi0, const NuclearState& nuc0, const Physics& physics,
                           const SolverSettings& s, double t0) {
  require_orbitals(psi0);
  nuc0.validate();
  const std::size_t steps = s.steps_per_window();
  const double box = psi0.front().grid().box_length();
  CoupledResult out;
  FixedPointReport& rep = out.report;
  rep.region = FeasibilityRegion::from_initial(psi0, nuc0, s);
  rep.status = SolveStatus::max_iters;

  TrajectoryRecord nuc_traj = ballistic_trajectory(nuc0, window_times(t0, s.dt, steps));
  TrajectoryRecord electrons;
  int streak = 0;
  for (int it = 0; it < s.max_picard_iters; ++it) {
    electrons = solve_electron(nuc_traj, psi0, nuc0, physics, s);
    NuclearResult nuc = solve_nuclear(density_track(electrons, box), nuc0, physics, s, {},
                                      it == 0 ? std::vector<std::vector<Vec3>>{} : nuc_traj.positions);
    double d = 0.0;
    for (std::size_t n = 0; n <= steps; ++n) {
      d = std::max(d, stacked_distance(nuc.trajectory.positions[n], nuc_traj.positions[n]));
    }
    rep.residuals.push_back(d);
    rep.alternations = it + 1;
    const bool nuc_ok = nuc.report.ok();
    rep.nuclear_reports.push_back(nuc.report);
    nuc_traj = std::move(nuc.trajectory);
    if (!nuc_ok) {
      rep.status = nuc.report.status;
      rep.message = "nuclear solve failed: " + nuc.report.message;
      rep.in_b_nuc = nuc.report.in_feasible_region;
      break;
    }
    if (rep.residuals.size() >= 2) {
      const double prev = rep.residuals[rep.residuals.size() - 2];
      streak = (prev > 0.0 && d > prev) ? streak + 1 : 0;
    }
    if (d < s.picard_tol) {
      rep.status = SolveStatus::converged;
      break;
    }
    if (streak >= kDivergenceStreak) {
      rep.status = SolveStatus::diverged;
      rep.message = "alternation residual grew for 3 consecutive iterations";
      break;
    }
  }
  if (rep.status == SolveStatus::max_iters) {
    rep.message = "alternation did not converge within " + std::to_string(s.max_picard_iters) + " iterations";
  }

  for (std::size_t i = 0; i < electrons.snapshots.size(); ++i) {
    OrbitalSet diff = electrons.snapshots[i];
    for (std::size_t j = 0; j < diff.size(); ++j) diff[j] -= psi0[j];
    rep.max_electron_distance = std::max(rep.max_electron_distance, h2_norm(diff));
  }
  rep.in_b_el = rep.max_electron_distance <= rep.region.alpha;
  for (std::size_t n = 0; n <= steps && rep.in_b_nuc; ++n) {
    rep.in_b_nuc = stacked_distance(nuc_traj.positions[n], nuc0.positions) <= rep.region.delta &&
                   stacked_norm(nuc_traj.velocities[n]) <= rep.region.gamma;
  }

  TrajectoryRecord& rec = out.trajectory;
  rec = std::move(electrons);
  rec.positions = std::move(nuc_traj.positions);
  rec.velocities = std::move(nuc_traj.velocities);
  rec.accelerations = std::move(nuc_traj.accelerations);
  return out;
}

namespace {

std::string describe_failure(std::size_t window, const FixedPointReport& r) {
  std::ostringstream os;
  os << "window " << window << " failed (" << to_string(r.status) << ")";
  if (!r.message.empty()) os << ": " << r.message;
  return os.str();
}

}  // namespace

SimulationError::SimulationError(std::size_t window, FixedPointReport report)
    : std::runtime_error(describe_failure(window, report)), window_(window), report_(std::move(report)) {}

SimulationResult run_simulation(const OrbitalSet& psi0, const NuclearState& nuc0, const Physics& physics,
                                const SolverSettings& s, double total_time, std::size_t sample_stride,
                                const SampleObserver& observer, bool keep_snapshots) {
  s.validate();
  if (sample_stride < 1) throw InvalidInput("output stride must be >= 1");
  if (!(total_time >= s.window_tau)) throw InvalidInput("time.total must be >= time.window_tau");
  const double ratio = total_time / s.window_tau;
  const double windows_d = std::round(ratio);
  if (std::abs(ratio - windows_d) > 1e-9 * windows_d) {
    throw InvalidInput("time.total must be an integer multiple of time.window_tau");
  }
  const auto windows = static_cast<std::size_t>(windows_d);
  const std::size_t steps = s.steps_per_window();
  const std::size_t total_steps = windows * steps;

  SolverSettings ws = s;
  ws.snapshot_stride = 1;
  SimulationResult out;
  OrbitalSet psi = psi0;
  NuclearState nuc = nuc0;

  const auto record = [&](double t, const OrbitalSet& orbs, const NuclearState& state) {
    auto& r = out.record;
    r.times.push_back(t);
    r.positions.push_back(state.positions);
    r.velocities.push_back(state.velocities);
    r.orbital_norms.push_back(orbital_norms(orbs));
    if (keep_snapshots) {
      r.snapshot_index.push_back(r.times.size() - 1);
      r.snapshots.push_back(orbs);
    }
    if (observer) observer(t, orbs, state);
  };
  record(0.0, psi, nuc);

  ws.snapshot_stride = std::gcd(steps, sample_stride);
  for (std::size_t w = 0; w < windows; ++w) {
    const double t0 = static_cast<double>(w * steps) * s.dt;
    CoupledResult cr = coupled_step(psi, nuc, physics, ws, t0);
    if (!cr.report.ok()) throw SimulationError(w, cr.report);
    const TrajectoryRecord& tr = cr.trajectory;
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
      const std::size_t n = tr.snapshot_index[i];
      const std::size_t g = w * steps + n;
      if (n == 0 || !(g % sample_stride == 0 || g == total_steps)) continue;
      NuclearState state = nuc;
      state.positions = tr.positions[n];
      state.velocities = tr.velocities[n];
      record(tr.times[n], tr.snapshots[i], state);
    }
    psi = tr.snapshots.back();
    nuc.positions = tr.positions.back();
    nuc.velocities = tr.velocities.back();
    out.windows.push_back(std::move(cr.report));
  }
  out.final_orbitals = psi;
  out.final_nuclei = nuc;
  return out;
}

}  // namespace ksnd
