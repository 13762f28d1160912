#include <benchmark/benchmark.h>

#include "ksnd/dynamics.hpp"
#include "ksnd/model.hpp"
#include "ksnd/spectral.hpp"
#include "ksnd/states.hpp"

using namespace ksnd;

namespace {

std::size_t side(const benchmark::State& state) { return static_cast<std::size_t>(state.range(0)); }

NuclearState two_protons(double box) {
  NuclearState nuc;
  nuc.positions = {{box / 2 - 0.7, box / 2, box / 2}, {box / 2 + 0.7, box / 2, box / 2}};
  nuc.velocities = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  nuc.masses = {1836.15267343, 1836.15267343};
  nuc.charges = {1, 1};
  return nuc;
}

void BM_Laplacian(benchmark::State& state) {
  const auto g = Grid::make(side(state), 10.0);
  Rng rng(1);
  const ComplexField f = random_band_limited(g, rng);
  for (auto _ : state) benchmark::DoNotOptimize(spectral::laplacian(f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g->size()));
}

void BM_Poisson(benchmark::State& state) {
  const auto g = Grid::make(side(state), 10.0);
  const RealField rho = density({gaussian_packet(g, {5.0, 5.0, 5.0}, 1.0, {0.0, 0.0, 0.0})});
  for (auto _ : state) benchmark::DoNotOptimize(spectral::poisson_hartree(rho));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g->size()));
}

void BM_QuadratureAccel(benchmark::State& state) {
  const double box = 10.0;
  const auto g = Grid::make(side(state), box);
  const NuclearState nuc = two_protons(box);
  const RealField rho = density({gaussian_packet(g, {5.0, 5.0, 5.0}, 1.0, {0.0, 0.0, 0.0})});
  for (auto _ : state) benchmark::DoNotOptimize(electron_nuclear_accel(rho, nuc, 0.5));
}

// One window of ten split steps on a frozen nuclear trajectory.
void BM_SplitStepWindow(benchmark::State& state) {
  const double box = 10.0;
  const auto g = Grid::make(side(state), box);
  const NuclearState nuc = two_protons(box);
  const OrbitalSet psi = {gaussian_packet(g, {5.0, 5.0, 5.0}, 1.0, {0.0, 0.0, 0.0})};
  Physics physics;
  physics.exchange = {-0.5, 3.5, 2.0 * box / static_cast<double>(g->points_per_axis())};
  SolverSettings s;
  s.dt = 0.01;
  s.window_tau = 0.1;
  s.snapshot_stride = 10;
  std::vector<double> times;
  for (std::size_t i = 0; i <= 10; ++i) times.push_back(static_cast<double>(i) * s.dt);
  const TrajectoryRecord traj = ballistic_trajectory(nuc, times);
  for (auto _ : state) benchmark::DoNotOptimize(solve_electron(traj, psi, nuc, physics, s));
}

}  // namespace

BENCHMARK(BM_Laplacian)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Poisson)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_QuadratureAccel)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SplitStepWindow)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
