#pragma once

#include <array>

#include "ksnd/field.hpp"

/// Fourier-space kernels on the periodic box. Every operation is a pure
/// function of its inputs.
namespace ksnd::spectral {

/// Forward transform of a field (unnormalised coefficients).
ComplexBuffer to_fourier(const ComplexField& f);
ComplexField from_fourier(const GridPtr& grid, ComplexBuffer coefficients);

/// Delta f via the multiplier -|k|^2.
ComplexField laplacian(const ComplexField& f);
RealField laplacian(const RealField& f);

/// Spectral gradient (i k_x f, i k_y f, i k_z f); Nyquist modes are dropped.
std::array<ComplexField, 3> gradient(const ComplexField& f);
std::array<RealField, 3> gradient(const RealField& f);
ComplexField divergence(const std::array<ComplexField, 3>& v);

/// Free propagator exp(i dt Delta / 2), i.e. multiplier exp(-i dt |k|^2 / 2).
ComplexField free_propagate(const ComplexField& f, double dt);
/// In-place variant used by the time steppers.
void free_propagate_inplace(ComplexField& f, double dt);

/// Free propagator with the multiplier tabulated once for a fixed dt.
class FreePropagator {
 public:
  FreePropagator(GridPtr grid, double dt);
  void apply(ComplexField& f) const;
  double dt() const { return dt_; }

 private:
  GridPtr grid_;
  double dt_;
  std::vector<Complex> phase_;
};

/// Solves Delta v = -4 pi rho with the k = 0 mode of v set to zero
/// (uniform neutralising background). The mean of rho does not contribute.
RealField poisson_hartree(const RealField& rho);
/// Same kernel for a complex source, used for the pair potentials G[phi_i, phi_j].
ComplexField poisson_hartree(const ComplexField& source);

/// Trilinear interpolation at an arbitrary point; the point is wrapped into the box.
double interpolate_at(const RealField& f, const Vec3& point);
Complex interpolate_at(const ComplexField& f, const Vec3& point);
Vec3 interpolate_at(const std::array<RealField, 3>& f, const Vec3& point);

/// Midpoint rule: cell_volume * sum of samples.
double integrate(const RealField& f);
Complex integrate(const ComplexField& f);

/// Discrete L^2 inner product <f, g> = dV sum conj(f) g.
Complex inner(const ComplexField& f, const ComplexField& g);
double l2_norm(const ComplexField& f);
double l2_norm(const RealField& f);
/// L^2 norm evaluated from Fourier coefficients (Parseval).
double l2_norm_fourier(const ComplexField& f);

}  // namespace ksnd::spectral
