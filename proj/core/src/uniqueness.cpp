#include "ksnd/uniqueness.hpp"

#include <cmath>
#include <cstring>

#include "ksnd/error.hpp"
#include "ksnd/norms.hpp"
#include "ksnd/spectral.hpp"
#include "ksnd/states.hpp"

namespace ksnd {

namespace {

template <typename T>
bool same_bits(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0);
}

template <typename T>
bool same_bits(std::span<const T> a, std::span<const T> b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0);
}

}  // namespace

UniquenessReport uniqueness_probe(const TrajectoryRecord& a, const TrajectoryRecord& b, double p) {
  if (!(p > 2.0)) throw InvalidInput("uniqueness probe: p must exceed 2");
  if (!a.has_nuclear() || !b.has_nuclear()) throw InvalidInput("uniqueness probe: records need nuclear positions");
  if (a.snapshots.empty() || a.snapshot_index != b.snapshot_index || a.times != b.times) {
    throw InvalidInput("uniqueness probe: records must share sampling");
  }
  UniquenessReport r;
  r.p = p;
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    const std::size_t i = a.snapshot_index[k];
    const auto& sa = a.snapshots[k];
    const auto& sb = b.snapshots[k];
    if (sa.size() != sb.size()) throw InvalidInput("uniqueness probe: orbital counts differ");
    double eg = 0.0;
    for (std::size_t j = 0; j < sa.size(); ++j) eg += lorentz_quasinorm(sa[j] - sb[j], 3.0);
    const double ng = stacked_distance(a.positions[i], b.positions[i]);
    r.times.push_back(a.times[i]);
    r.nuclear_gap.push_back(ng);
    r.electron_gap.push_back(eg);
    r.h.push_back(std::pow(ng + eg, p));
    r.max_h = std::max(r.max_h, r.h.back());
  }

  double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < r.h.size(); ++k) {
    if (!(r.h[k] > 0.0)) continue;
    const double y = std::log(r.h[k]);
    n += 1.0;
    sx += r.times[k];
    sy += y;
    sxx += r.times[k] * r.times[k];
    sxy += r.times[k] * y;
  }
  const double den = n * sxx - sx * sx;
  if (n >= 2.0 && den > 0.0) {
    r.fitted = true;
    r.rate = (n * sxy - sx * sy) / den;
    r.intercept = (sy - r.rate * sx) / n;
  }
  return r;
}

bool bit_identical(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  if (!same_bits(a.times, b.times) || a.snapshot_index != b.snapshot_index) return false;
  const auto vecs = [](const auto& x, const auto& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!same_bits(x[i], y[i])) return false;
    }
    return true;
  };
  if (!vecs(a.positions, b.positions) || !vecs(a.velocities, b.velocities) ||
      !vecs(a.accelerations, b.accelerations) || !vecs(a.orbital_norms, b.orbital_norms)) {
    return false;
  }
  if (a.densities.size() != b.densities.size() || a.snapshots.size() != b.snapshots.size()) return false;
  for (std::size_t i = 0; i < a.densities.size(); ++i) {
    if (!same_bits(a.densities[i].values(), b.densities[i].values())) return false;
  }
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    if (a.snapshots[k].size() != b.snapshots[k].size()) return false;
    for (std::size_t j = 0; j < a.snapshots[k].size(); ++j) {
      if (!same_bits(a.snapshots[k][j].values(), b.snapshots[k][j].values())) return false;
    }
  }
  return true;
}

PerturbationSweep perturbation_sweep(const OrbitalSet& psi0, const NuclearState& nuc0, const Physics& physics,
                                     const SolverSettings& s, double total_time, const std::vector<double>& sizes,
                                     std::uint64_t seed, double p) {
  if (sizes.empty()) throw InvalidInput("perturbation sweep: need at least one size");
  if (psi0.empty()) throw InvalidInput("perturbation sweep: need at least one orbital");
  const std::size_t stride = s.steps_per_window();
  const SimulationResult base = run_simulation(psi0, nuc0, physics, s, total_time, stride);

  Rng rng(seed);
  OrbitalSet xi;
  for (const auto& f : psi0) {
    ComplexField x = random_band_limited(f.grid_ptr(), rng);
    x *= Complex(1.0 / spectral::l2_norm(x), 0.0);
    xi.push_back(std::move(x));
  }

  PerturbationSweep out;
  out.sizes = sizes;
  for (const double size : sizes) {
    OrbitalSet pert = psi0;
    for (std::size_t j = 0; j < pert.size(); ++j) pert[j] += Complex(size, 0.0) * xi[j];
    const SimulationResult run = run_simulation(pert, nuc0, physics, s, total_time, stride);
    out.reports.push_back(uniqueness_probe(base.record, run.record, p));
  }
  for (std::size_t i = 1; i < out.reports.size(); ++i) {
    out.gap_ratios.push_back(out.reports[i].end_gap() / out.reports[i - 1].end_gap());
    out.h_ratios.push_back(out.reports[i].h.back() / out.reports[i - 1].h.back());
  }
  return out;
}

}  // namespace ksnd
