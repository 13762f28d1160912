#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "ksnd/error.hpp"
#include "ksnd/norms.hpp"
#include "ksnd/probes.hpp"
#include "ksnd/spectral.hpp"
#include "ksnd/states.hpp"

using namespace ksnd;
using namespace ksnd::test;

namespace {

ProbeSettings small(std::size_t samples, std::uint64_t seed = 7) {
  ProbeSettings ps;
  ps.samples = samples;
  ps.seed = seed;
  return ps;
}

NuclearState one_proton(const Vec3& at) {
  NuclearState n;
  n.positions = {at};
  n.velocities = {Vec3{}};
  n.masses = {1836.0};
  n.charges = {1};
  return n;
}

}  // namespace

TEST(SplitSample, CountsViolationsAgainstCalibratedMax) {
  const SplitSample s = split_sample({1.0, 2.0, 3.9, 4.1, 0.5}, 2, 2.0);
  EXPECT_EQ(s.calibrated, 2.0);
  EXPECT_EQ(s.asserted, 3u);
  EXPECT_EQ(s.max_asserted, 4.1);
  EXPECT_EQ(s.violations, 1u);
  EXPECT_FALSE(s.pass());
  EXPECT_TRUE(split_sample({1.0, 2.0, 3.9, 0.5}, 2, 2.0).pass());
}

TEST(SplitSample, NonFiniteFails) {
  const SplitSample s = split_sample({1.0, std::numeric_limits<double>::infinity()}, 1);
  EXPECT_FALSE(s.all_finite);
  EXPECT_FALSE(s.pass());
}

TEST(SplitSample, RejectsEmptySides) {
  EXPECT_THROW(split_sample({1.0, 2.0}, 0), InvalidInput);
  EXPECT_THROW(split_sample({1.0, 2.0}, 2), InvalidInput);
}

TEST(RandomPair, RadiusAndSeparation) {
  const auto g = Grid::make(16, 8.0);
  Rng rng(3);
  ProbeSettings ps;
  ps.radius = 2.0;
  ps.orbitals = 2;
  for (int k = 0; k < 5; ++k) {
    const StatePair pr = random_pair(g, rng, ps);
    ASSERT_EQ(pr.a.size(), 2u);
    EXPECT_NEAR(h2_norm(pr.a), 2.0, 1e-10);
    OrbitalSet d = pr.a;
    for (std::size_t j = 0; j < d.size(); ++j) d[j] -= pr.b[j];
    const double eta = h2_norm(d);
    EXPECT_GE(eta, 2e-3 * (1.0 - 1e-10));
    EXPECT_LE(eta, 2.0 * (1.0 + 1e-10));
  }
}

// Low-band factors keep the product inside the grid band, so the product rule
// and the spectral Laplacian of v psi agree to round-off.
TEST(ProductLaplacian, MatchesSpectralForBandLimitedFactors) {
  const auto g = Grid::make(16, 6.0);
  Rng rng(5);
  const ComplexField vc = random_band_limited(g, rng, 0.2);
  RealField v(g);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = vc[i].real();
  const ComplexField psi = random_band_limited(g, rng, 0.2);
  ComplexField vpsi = psi;
  for (std::size_t i = 0; i < psi.size(); ++i) vpsi[i] *= v[i];
  const ComplexField lhs = collocated_product_laplacian(v, spectral::gradient(v), spectral::laplacian(v), psi);
  const ComplexField rhs = spectral::laplacian(vpsi);
  EXPECT_LE(max_abs_diff(lhs, rhs), 1e-10 * max_abs(rhs));
}

TEST(HartreeDifference, IdenticalStatesGiveZero) {
  const auto g = Grid::make(16, 8.0);
  Rng rng(11);
  const OrbitalSet a{random_h2_field(g, rng, 1.0)};
  EXPECT_EQ(hartree_difference_h2(a, a), 0.0);
}

TEST(HartreeDifference, AgainstVacuumIsSelfTerm) {
  const auto g = Grid::make(16, 8.0);
  Rng rng(12);
  const OrbitalSet a{random_h2_field(g, rng, 1.0)};
  const OrbitalSet zero{ComplexField(g)};
  ComplexField vpsi = a[0];
  const RealField v = hartree_potential(density(a));
  for (std::size_t i = 0; i < vpsi.size(); ++i) vpsi[i] *= v[i];
  const double d = hartree_difference_h2(a, zero);
  EXPECT_GT(d, 0.0);
  EXPECT_GE(d, spectral::l2_norm(vpsi));
}

TEST(HartreeProbe, SplitSamplePasses) {
  const auto g = Grid::make(16, 8.0);
  const ProbeReport r = lipschitz_probe_hartree(g, small(200));
  ASSERT_EQ(r.inequalities.size(), 3u);
  for (const auto& i : r.inequalities) {
    EXPECT_TRUE(i.split.pass()) << i.name << " max " << i.split.max_asserted << " vs " << i.split.calibrated;
    EXPECT_EQ(i.split.calibrate, 100u);
    EXPECT_GT(i.split.calibrated, 0.0);
  }
  EXPECT_TRUE(r.pass());
}

TEST(HartreeProbe, SeedReproducible) {
  const auto g = Grid::make(8, 6.0);
  const ProbeReport a = lipschitz_probe_hartree(g, small(10, 99));
  const ProbeReport b = lipschitz_probe_hartree(g, small(10, 99));
  EXPECT_EQ(a.get("C").ratios, b.get("C").ratios);
  EXPECT_THROW(a.get("Z"), InvalidInput);
}

TEST(ExchangeDifference, ZeroCouplingAndIdenticalStates) {
  const auto g = Grid::make(16, 8.0);
  Rng rng(21);
  const OrbitalSet a{random_h2_field(g, rng, 1.0)};
  const OrbitalSet b{random_h2_field(g, rng, 1.0)};
  EXPECT_EQ(exchange_difference_h2(a, b, {0.0, 3.5, 0.0}), 0.0);
  EXPECT_EQ(exchange_difference_h2(a, a, {1.0, 3.5, 0.0}), 0.0);
  EXPECT_GT(exchange_difference_h2(a, b, {1.0, 3.5, 0.0}), 0.0);
}

// For q = 2 the exchange potential is lambda rho, which is band-limited when
// psi is, so the chain rule route matches the spectral product.
TEST(ExchangeDifference, QuadraticExchangeMatchesSpectral) {
  const auto g = Grid::make(16, 6.0);
  Rng rng(22);
  const ComplexField a = random_band_limited(g, rng, 0.15);
  const double lam = 0.7;
  ComplexField f = a;
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= lam * std::norm(a[i]);
  const double expect = h2_norm(f);
  EXPECT_NEAR(exchange_difference_h2({a}, {ComplexField(g)}, {lam, 2.0, 0.0}), expect, 1e-10 * expect);
}

TEST(BoundFunctions, Surrogates) {
  const ExchangeParams xp{0.5, 3.5, 0.0};
  EXPECT_NEAR(exchange_bound_function(2.0, xp), 0.5 * 32.0, 1e-13);
  EXPECT_NEAR(combined_bound_function(2.0, 4, xp), 2.0 * 4.0 + 16.0, 1e-13);
  EXPECT_EQ(exchange_bound_function(2.0, {-0.5, 3.5, 0.0}), exchange_bound_function(2.0, xp));
}

TEST(ExchangeProbe, SplitSamplePasses) {
  const auto g = Grid::make(16, 8.0);
  const ProbeReport r = lipschitz_probe_exchange(g, {1e-3, 3.5, 0.0}, small(200));
  ASSERT_EQ(r.inequalities.size(), 4u);
  for (const auto& i : r.inequalities) {
    EXPECT_TRUE(i.split.pass()) << i.name << " max " << i.split.max_asserted << " vs " << i.split.calibrated;
  }
}

TEST(ExchangeProbe, ZeroCouplingHasZeroExchangeSides) {
  const auto g = Grid::make(8, 6.0);
  const ProbeReport r = lipschitz_probe_exchange(g, {0.0, 3.5, 0.0}, small(6));
  for (const char* n : {"D", "E"}) {
    for (double l : r.get(n).lhs) EXPECT_EQ(l, 0.0);
  }
  EXPECT_THROW(lipschitz_probe_exchange(g, {1.0, 3.5, 0.0}, small(6), 0.5), InvalidInput);
}

TEST(ThresholdSweep, ContrastAcrossThreshold) {
  const auto g = Grid::make(16, 10.0);
  const std::vector<double> m{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  const ThresholdSweep low = exchange_threshold_sweep(g, 4.0 / 3.0, m, 1);
  const ThresholdSweep high = exchange_threshold_sweep(g, 3.5, m, 1);
  EXPECT_GE(low.growth, 10.0);
  EXPECT_LT(high.spread, 2.0);
  for (std::size_t i = 1; i < low.ratios.size(); ++i) EXPECT_GT(low.ratios[i], low.ratios[i - 1]);
}

TEST(ThresholdSweep, RejectsBadInput) {
  const auto g = Grid::make(8, 10.0);
  EXPECT_THROW(exchange_threshold_sweep(g, 3.5, {1e-2}, 1), InvalidInput);
  EXPECT_THROW(exchange_threshold_sweep(g, 3.5, {1e-2, 0.0}, 1), InvalidInput);
}

TEST(Mve, HalfExponentSharpConstantIsOne) {
  const auto g = Grid::make(16, 8.0);
  const ProbeReport r = mve_probe(g, {0.5}, {}, small(100));
  const InequalityResult& h = r.get("mve alpha=0.5");
  EXPECT_NEAR(h.max_ratio, 1.0, 1e-12);
  for (double q : h.ratios) EXPECT_LE(q, 1.0 + 1e-12);
}

TEST(Mve, LargerExponentsPassSplitSample) {
  const auto g = Grid::make(16, 8.0);
  const ProbeReport r = mve_probe(g, {2.5}, {1.5, 2.5}, small(200));
  ASSERT_EQ(r.inequalities.size(), 3u);
  for (const auto& i : r.inequalities) {
    EXPECT_TRUE(i.split.pass()) << i.name << " max " << i.split.max_asserted << " vs " << i.split.calibrated;
  }
}

TEST(Mve, RejectsSmallExponents) {
  EXPECT_THROW(mve_pair_ratios({}, 0.4), InvalidInput);
  EXPECT_THROW(mve_gradient_pair_ratios({}, 1.4), InvalidInput);
}

TEST(ForceProbe, RatiosWithinUnitBoundAndReal) {
  const auto g = Grid::make(16, 8.0);
  const ProbeReport r = force_probe(g, small(20));
  EXPECT_TRUE(r.pass());
  EXPECT_LE(r.diagnostics.at("diagonal_imag_residue"), 1e-12);
}

TEST(PropagatorProbe, FreePropagatorIsIsometric) {
  const auto g = Grid::make(16, 8.0);
  SolverSettings s;
  s.dt = 0.01;
  s.window_tau = 0.2;
  s.snapshot_stride = 1;
  std::vector<double> times(21);
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = 0.01 * static_cast<double>(i);
  const NuclearState none;
  const auto r = propagator_norm_probe(ballistic_trajectory(none, times), none, g, 0.5, s, {0.1, 0.2}, 2, 4);
  for (double a : r.amplification) EXPECT_NEAR(a, 1.0, 1e-12);
  EXPECT_LE(r.max_l2_defect, 1e-12);
  EXPECT_TRUE(r.clamped);
  EXPECT_GT(r.C, 2.0);
}

TEST(PropagatorProbe, AmplificationNondecreasingWithWindow) {
  const auto g = Grid::make(16, 8.0);
  const NuclearState n = one_proton({4.0, 4.0, 4.0});
  SolverSettings s;
  s.dt = 0.01;
  s.window_tau = 0.4;
  s.snapshot_stride = 1;
  std::vector<double> times(41);
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = 0.01 * static_cast<double>(i);
  const std::vector<double> thetas{0.1, 0.2, 0.4};
  const auto r = propagator_norm_probe(ballistic_trajectory(n, times), n, g, 2.0 * g->spacing(), s, thetas, 3, 8);
  ASSERT_EQ(r.amplification.size(), 3u);
  EXPECT_GT(r.amplification[0], 1.0);
  for (std::size_t i = 1; i < thetas.size(); ++i) EXPECT_GE(r.amplification[i], r.amplification[i - 1]);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    EXPECT_LE(r.amplification[i], std::pow(r.A, 1.0 + r.C * thetas[i]) * (1.0 + 1e-12));
  }
  EXPECT_LE(r.max_l2_defect, 1e-10);
}

TEST(PropagatorProbe, RejectsBadWindows) {
  const auto g = Grid::make(8, 8.0);
  SolverSettings s;
  s.dt = 0.01;
  s.window_tau = 0.1;
  const NuclearState none;
  const auto traj = ballistic_trajectory(none, {0.0, 0.01});
  EXPECT_THROW(propagator_norm_probe(traj, none, g, 0.5, s, {0.1}, 1, 0), InvalidInput);
  EXPECT_THROW(propagator_norm_probe(traj, none, g, 0.5, s, {0.1, 0.05}, 1, 0), InvalidInput);
  EXPECT_THROW(propagator_norm_probe(traj, none, g, 0.5, s, {0.1, 0.2}, 1, 0), InvalidInput);
  EXPECT_THROW(propagator_norm_probe(traj, none, g, 0.5, s, {0.05, 0.1}, 0, 0), InvalidInput);
}
