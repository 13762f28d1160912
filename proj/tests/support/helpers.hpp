#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ksnd/field.hpp"
#include "ksnd/grid.hpp"

namespace ksnd::test {

inline constexpr double kPi = std::numbers::pi;

/// exp(i k.r) with k = 2 pi m / L.
inline ComplexField plane_wave(const GridPtr& g, int mx, int my, int mz) {
  ComplexField f(g);
  const double b = 2.0 * kPi / g->box_length();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vec3 r = g->position(i);
    const double ph = b * (mx * r[0] + my * r[1] + mz * r[2]);
    f[i] = Complex(std::cos(ph), std::sin(ph));
  }
  return f;
}

inline double wave_k2(const GridPtr& g, int mx, int my, int mz) {
  const double b = 2.0 * kPi / g->box_length();
  return b * b * (mx * mx + my * my + mz * mz);
}

template <typename T>
double max_abs_diff(const Field<T>& a, const Field<T>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <typename T>
double max_abs(const Field<T>& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

}  // namespace ksnd::test
