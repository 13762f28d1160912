#pragma once

#include <cstdint>
#include <random>

#include "ksnd/model.hpp"

namespace ksnd {

using Rng = std::mt19937_64;

/// Normalised Gaussian wave packet whose density has standard deviation
/// `width` per axis: (2 pi w^2)^{-3/4} exp(-|r-c|^2 / (4 w^2) + i k.r), using
/// minimum-image displacements from `center`.
ComplexField gaussian_packet(const GridPtr& grid, const Vec3& center, double width, const Vec3& momentum);

/// Random smooth field: complex normal Fourier coefficients damped by
/// exp(-|k|^2 / (2 kc^2)) with kc = cutoff_fraction * (pi / spacing), zero
/// beyond kc. Not normalised.
ComplexField random_band_limited(const GridPtr& grid, Rng& rng, double cutoff_fraction = 0.35);

/// random_band_limited rescaled to the given H2 norm.
ComplexField random_h2_field(const GridPtr& grid, Rng& rng, double h2_radius, double cutoff_fraction = 0.35);

/// Modified Gram-Schmidt in the discrete L2 inner product.
void orthonormalize(OrbitalSet& psi);

}  // namespace ksnd
