#include <gtest/gtest.h>

#include <cmath>

#include "ksnd/error.hpp"
#include "ksnd/states.hpp"
#include "ksnd/uniqueness.hpp"

using namespace ksnd;

namespace {

struct Problem {
  GridPtr grid = Grid::make(16, 12.0);
  NuclearState nuc;
  OrbitalSet psi;
  Physics physics;
  SolverSettings solver;

  Problem() {
    nuc.positions = {{5.0, 6.0, 6.0}, {7.0, 6.0, 6.0}};
    nuc.velocities = {Vec3{}, Vec3{}};
    nuc.masses = {1836.0, 1836.0};
    nuc.charges = {1, 1};
    psi = {gaussian_packet(grid, {6.0, 6.0, 6.0}, 1.0, {})};
    physics.exchange = {1e-3, 3.5, 2.0 * grid->spacing()};
    solver.dt = 0.01;
    solver.window_tau = 0.1;
  }
};

}  // namespace

TEST(Uniqueness, IdenticalRunsAreBitIdentical) {
  const Problem su;
  const std::size_t stride = su.solver.steps_per_window();
  const auto a = run_simulation(su.psi, su.nuc, su.physics, su.solver, 0.3, stride);
  const auto b = run_simulation(su.psi, su.nuc, su.physics, su.solver, 0.3, stride);
  EXPECT_TRUE(bit_identical(a.record, b.record));
  const UniquenessReport r = uniqueness_probe(a.record, b.record, 3.0);
  EXPECT_EQ(r.times.size(), 4u);
  for (double h : r.h) EXPECT_EQ(h, 0.0);
  EXPECT_TRUE(r.identical());
  EXPECT_FALSE(r.fitted);
}

TEST(Uniqueness, DetectsSingleBitChange) {
  const Problem su;
  const auto a = run_simulation(su.psi, su.nuc, su.physics, su.solver, 0.1, 10);
  auto b = a.record;
  b.positions.back()[0][1] = std::nextafter(b.positions.back()[0][1], 1e9);
  EXPECT_FALSE(bit_identical(a.record, b));
  b = a.record;
  auto& z = b.snapshots.back()[0][7];
  z = Complex(std::nextafter(z.real(), 1e9), z.imag());
  EXPECT_FALSE(bit_identical(a.record, b));
}

TEST(Uniqueness, RejectsMismatchedRecords) {
  const Problem su;
  const auto a = run_simulation(su.psi, su.nuc, su.physics, su.solver, 0.2, 10);
  const auto b = run_simulation(su.psi, su.nuc, su.physics, su.solver, 0.1, 10);
  EXPECT_THROW(uniqueness_probe(a.record, b.record, 3.0), InvalidInput);
  EXPECT_THROW(uniqueness_probe(a.record, a.record, 2.0), InvalidInput);
}

TEST(Uniqueness, PerturbationGapScalesLinearly) {
  const Problem su;
  const std::vector<double> sizes{1e-6, 1e-5, 1e-4};
  const double p = 3.0;
  const PerturbationSweep sw = perturbation_sweep(su.psi, su.nuc, su.physics, su.solver, 0.5, sizes, 9, p);
  ASSERT_EQ(sw.reports.size(), 3u);
  ASSERT_EQ(sw.gap_ratios.size(), 2u);
  for (std::size_t i = 0; i < sw.gap_ratios.size(); ++i) {
    EXPECT_GE(sw.gap_ratios[i], 5.0);
    EXPECT_LE(sw.gap_ratios[i], 20.0);
    EXPECT_GE(sw.h_ratios[i], 0.5 * std::pow(10.0, p));
    EXPECT_LE(sw.h_ratios[i], 2.0 * std::pow(10.0, p));
  }
  for (const auto& r : sw.reports) {
    EXPECT_EQ(r.nuclear_gap.front(), 0.0);
    EXPECT_GT(r.h.front(), 0.0);
    EXPECT_TRUE(r.fitted);
    EXPECT_TRUE(std::isfinite(r.rate));
  }
}

TEST(Uniqueness, ZeroPerturbationReproducesBase) {
  const Problem su;
  const PerturbationSweep sw = perturbation_sweep(su.psi, su.nuc, su.physics, su.solver, 0.2, {0.0}, 1, 3.0);
  EXPECT_TRUE(sw.reports.front().identical());
  EXPECT_THROW(perturbation_sweep(su.psi, su.nuc, su.physics, su.solver, 0.2, {}, 1, 3.0), InvalidInput);
}
