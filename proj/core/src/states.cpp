#include "ksnd/states.hpp"

#include <cmath>
#include <numbers>

#include "ksnd/error.hpp"
#include "ksnd/norms.hpp"
#include "ksnd/spectral.hpp"

namespace ksnd {

ComplexField gaussian_packet(const GridPtr& grid, const Vec3& center, double width, const Vec3& momentum) {
  if (!(width > 0.0)) throw InvalidInput("gaussian_packet: width must be positive");
  ComplexField f(grid);
  const double pref = std::pow(2.0 * std::numbers::pi * width * width, -0.75);
  const double inv = 1.0 / (4.0 * width * width);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vec3 d = grid->minimum_image(grid->position(i) - center);
    const double phase = dot(momentum, d);
    f[i] = pref * std::exp(-dot(d, d) * inv) * Complex(std::cos(phase), std::sin(phase));
  }
  return f;
}

ComplexField random_band_limited(const GridPtr& grid, Rng& rng, double cutoff_fraction) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double kc = cutoff_fraction * std::numbers::pi / grid->spacing();
  const auto k2 = grid->k_squared();
  ComplexBuffer c(grid->size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    if (k2[i] <= kc * kc) c[i] = std::exp(-k2[i] / (2.0 * kc * kc)) * Complex(re, im);
  }
  return spectral::from_fourier(grid, std::move(c));
}

ComplexField random_h2_field(const GridPtr& grid, Rng& rng, double h2_radius, double cutoff_fraction) {
  ComplexField f = random_band_limited(grid, rng, cutoff_fraction);
  const double n = h2_norm(f);
  f *= Complex(h2_radius / n);
  return f;
}

void orthonormalize(OrbitalSet& psi) {
  for (std::size_t j = 0; j < psi.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const Complex c = spectral::inner(psi[i], psi[j]);
      for (std::size_t p = 0; p < psi[j].size(); ++p) psi[j][p] -= c * psi[i][p];
    }
    const double n = spectral::l2_norm(psi[j]);
    if (!(n > 0.0)) throw InvalidInput("orthonormalize: linearly dependent orbitals");
    psi[j] *= Complex(1.0 / n);
  }
}

}  // namespace ksnd
