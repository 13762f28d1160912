#include "ksnd/spectral.hpp"

#include <cmath>
#include <numbers>

#include "ksnd/error.hpp"

namespace ksnd::spectral {

namespace {

using Coeffs = ComplexBuffer;

Coeffs forward_copy(std::span<const Complex> values, const Grid& g) {
  Coeffs c(values.begin(), values.end());
  g.fft().forward(c);
  return c;
}

Coeffs forward_real(const RealField& f) {
  Coeffs c(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) c[i] = f[i];
  f.grid().fft().forward(c);
  return c;
}

RealField backward_real(const GridPtr& grid, Coeffs c) {
  grid->fft().backward(c);
  RealField out(grid);
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

Coeffs laplacian_coeffs(const Grid& g, Coeffs c) {
  const auto k2 = g.k_squared();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= -k2[i];
  return c;
}

std::array<Coeffs, 3> gradient_coeffs(const Grid& g, const Coeffs& c) {
  std::array<Coeffs, 3> out{c, c, c};
  const auto kd = g.derivative_wavenumbers();
  const std::size_t n = g.points_per_axis();
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t l = 0; l < n; ++l, ++idx) {
        out[0][idx] *= Complex(0.0, kd[i]);
        out[1][idx] *= Complex(0.0, kd[j]);
        out[2][idx] *= Complex(0.0, kd[l]);
      }
    }
  }
  return out;
}

Coeffs poisson_coeffs(const Grid& g, Coeffs c) {
  const auto k2 = g.k_squared();
  constexpr double four_pi = 4.0 * std::numbers::pi;
  c[0] = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) c[i] *= four_pi / k2[i];
  return c;
}

void require_finite_dt(double dt) {
  if (!std::isfinite(dt)) throw InvalidInput("free_propagate: non-finite time step");
}

std::size_t wrap_index(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

// Cell corner indices and weights for trilinear interpolation.
struct Stencil {
  std::array<std::size_t, 8> idx;
  std::array<double, 8> w;
};

Stencil stencil(const Grid& g, const Vec3& point) {
  if (!is_finite(point)) throw InvalidInput("interpolate_at: non-finite point");
  const Vec3 p = g.wrap(point);
  const std::size_t n = g.points_per_axis();
  std::array<std::size_t, 3> lo{};
  std::array<std::size_t, 3> hi{};
  std::array<double, 3> frac{};
  for (int a = 0; a < 3; ++a) {
    const double s = p[a] / g.spacing();
    const double fl = std::floor(s);
    lo[a] = wrap_index(static_cast<long>(fl), n);
    hi[a] = wrap_index(static_cast<long>(fl) + 1, n);
    frac[a] = s - fl;
  }
  Stencil st{};
  int c = 0;
  for (int di = 0; di < 2; ++di) {
    for (int dj = 0; dj < 2; ++dj) {
      for (int dk = 0; dk < 2; ++dk, ++c) {
        st.idx[c] = g.index(di ? hi[0] : lo[0], dj ? hi[1] : lo[1], dk ? hi[2] : lo[2]);
        st.w[c] = (di ? frac[0] : 1.0 - frac[0]) * (dj ? frac[1] : 1.0 - frac[1]) * (dk ? frac[2] : 1.0 - frac[2]);
      }
    }
  }
  return st;
}

}  // namespace

ComplexBuffer to_fourier(const ComplexField& f) { return forward_copy(f.values(), f.grid()); }

ComplexField from_fourier(const GridPtr& grid, ComplexBuffer coefficients) {
  grid->fft().backward(coefficients);
  return ComplexField(grid, std::move(coefficients));
}

ComplexField laplacian(const ComplexField& f) {
  f.require_finite("laplacian");
  return from_fourier(f.grid_ptr(), laplacian_coeffs(f.grid(), to_fourier(f)));
}

RealField laplacian(const RealField& f) {
  f.require_finite("laplacian");
  return backward_real(f.grid_ptr(), laplacian_coeffs(f.grid(), forward_real(f)));
}

std::array<ComplexField, 3> gradient(const ComplexField& f) {
  f.require_finite("gradient");
  auto c = gradient_coeffs(f.grid(), to_fourier(f));
  return {from_fourier(f.grid_ptr(), std::move(c[0])), from_fourier(f.grid_ptr(), std::move(c[1])),
          from_fourier(f.grid_ptr(), std::move(c[2]))};
}

std::array<RealField, 3> gradient(const RealField& f) {
  f.require_finite("gradient");
  auto c = gradient_coeffs(f.grid(), forward_real(f));
  return {backward_real(f.grid_ptr(), std::move(c[0])), backward_real(f.grid_ptr(), std::move(c[1])),
          backward_real(f.grid_ptr(), std::move(c[2]))};
}

ComplexField divergence(const std::array<ComplexField, 3>& v) {
  const Grid& g = v[0].grid();
  require_same_grid(g, v[1].grid());
  require_same_grid(g, v[2].grid());
  const auto kd = g.derivative_wavenumbers();
  std::array<Coeffs, 3> c{to_fourier(v[0]), to_fourier(v[1]), to_fourier(v[2])};
  Coeffs sum(g.size());
  const std::size_t n = g.points_per_axis();
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t l = 0; l < n; ++l, ++idx) {
        sum[idx] = Complex(0.0, kd[i]) * c[0][idx] + Complex(0.0, kd[j]) * c[1][idx] + Complex(0.0, kd[l]) * c[2][idx];
      }
    }
  }
  return from_fourier(v[0].grid_ptr(), std::move(sum));
}

void free_propagate_inplace(ComplexField& f, double dt) {
  require_finite_dt(dt);
  if (dt == 0.0) return;
  const Grid& g = f.grid();
  auto data = f.values();
  g.fft().forward(data);
  const auto k2 = g.k_squared();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double phase = -0.5 * dt * k2[i];
    data[i] *= Complex(std::cos(phase), std::sin(phase));
  }
  g.fft().backward(data);
}

FreePropagator::FreePropagator(GridPtr grid, double dt) : grid_(std::move(grid)), dt_(dt) {
  require_finite_dt(dt);
  const auto k2 = grid_->k_squared();
  phase_.resize(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) {
    const double phase = -0.5 * dt * k2[i];
    phase_[i] = Complex(std::cos(phase), std::sin(phase));
  }
}

void FreePropagator::apply(ComplexField& f) const {
  require_same_grid(*grid_, f.grid());
  auto data = f.values();
  grid_->fft().forward(data);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= phase_[i];
  grid_->fft().backward(data);
}

ComplexField free_propagate(const ComplexField& f, double dt) {
  ComplexField out = f;
  free_propagate_inplace(out, dt);
  return out;
}

RealField poisson_hartree(const RealField& rho) {
  rho.require_finite("poisson_hartree");
  return backward_real(rho.grid_ptr(), poisson_coeffs(rho.grid(), forward_real(rho)));
}

ComplexField poisson_hartree(const ComplexField& source) {
  source.require_finite("poisson_hartree");
  return from_fourier(source.grid_ptr(), poisson_coeffs(source.grid(), to_fourier(source)));
}

double interpolate_at(const RealField& f, const Vec3& point) {
  const Stencil st = stencil(f.grid(), point);
  double v = 0.0;
  for (int c = 0; c < 8; ++c) v += st.w[c] * f[st.idx[c]];
  return v;
}

Complex interpolate_at(const ComplexField& f, const Vec3& point) {
  const Stencil st = stencil(f.grid(), point);
  Complex v = 0.0;
  for (int c = 0; c < 8; ++c) v += st.w[c] * f[st.idx[c]];
  return v;
}

Vec3 interpolate_at(const std::array<RealField, 3>& f, const Vec3& point) {
  const Stencil st = stencil(f[0].grid(), point);
  Vec3 v{};
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 8; ++c) v[a] += st.w[c] * f[a][st.idx[c]];
  }
  return v;
}

double integrate(const RealField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().cell_volume();
}

Complex integrate(const ComplexField& f) {
  Complex s = 0.0;
  for (const Complex& v : f.values()) s += v;
  return s * f.grid().cell_volume();
}

Complex inner(const ComplexField& f, const ComplexField& g) {
  require_same_grid(f.grid(), g.grid());
  Complex s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::conj(f[i]) * g[i];
  return s * f.grid().cell_volume();
}

double l2_norm(const ComplexField& f) {
  double s = 0.0;
  for (const Complex& v : f.values()) s += std::norm(v);
  return std::sqrt(s * f.grid().cell_volume());
}

double l2_norm(const RealField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s * f.grid().cell_volume());
}

double l2_norm_fourier(const ComplexField& f) {
  const Coeffs c = to_fourier(f);
  double s = 0.0;
  for (const Complex& v : c) s += std::norm(v);
  // Parseval for the unnormalised DFT: sum |f|^2 = sum |c|^2 / n^3.
  return std::sqrt(s / static_cast<double>(f.size()) * f.grid().cell_volume());
}

}  // namespace ksnd::spectral
