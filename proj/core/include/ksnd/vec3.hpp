#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace ksnd {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) {
  a[0] += b[0];
  a[1] += b[1];
  a[2] += b[2];
  return a;
}

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline bool is_finite(const Vec3& a) {
  return std::isfinite(a[0]) && std::isfinite(a[1]) && std::isfinite(a[2]);
}

/// Euclidean norm of a stacked (R^3)^M vector, |y|^2 = sum_k |y_k|^2.
inline double stacked_norm(std::span<const Vec3> ys) {
  double s = 0.0;
  for (const auto& y : ys) s += dot(y, y);
  return std::sqrt(s);
}

inline double stacked_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Vec3 d = a[k] - b[k];
    s += dot(d, d);
  }
  return std::sqrt(s);
}

}  // namespace ksnd
