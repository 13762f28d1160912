#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "ksnd/vec3.hpp"

namespace ksnd {

/// In-place 3-D complex FFT of one cubic size. Forward is unnormalised;
/// backward divides by the number of points so backward(forward(f)) == f.
class FftPlan {
 public:
  explicit FftPlan(std::size_t points_per_axis);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void forward(std::span<std::complex<double>> data) const;
  void backward(std::span<std::complex<double>> data) const;

 private:
  std::size_t n_;
  void* forward_plan_;
  void* backward_plan_;
  void* forward_unaligned_;
  void* backward_unaligned_;
};

/// Periodic cubic box [0, L)^3 sampled on n^3 points, with the spectral
/// tables needed by the Fourier kernels. Immutable after construction.
class Grid {
 public:
  Grid(std::size_t points_per_axis, double box_length);

  static std::shared_ptr<const Grid> make(std::size_t points_per_axis, double box_length) {
    return std::make_shared<const Grid>(points_per_axis, box_length);
  }

  std::size_t points_per_axis() const { return n_; }
  std::size_t size() const { return n_ * n_ * n_; }
  double box_length() const { return length_; }
  double spacing() const { return spacing_; }
  double cell_volume() const { return spacing_ * spacing_ * spacing_; }
  double volume() const { return length_ * length_ * length_; }

  /// Signed wavenumbers 2*pi*m/L, m = 0..n/2-1, -n/2..-1 (same on every axis).
  std::span<const double> wavenumbers() const { return k_; }
  /// Wavenumbers used for first derivatives: the Nyquist entry is zeroed so
  /// that derivatives of real fields stay real.
  std::span<const double> derivative_wavenumbers() const { return kd_; }
  /// |k|^2 per grid point in storage order.
  std::span<const double> k_squared() const { return k2_; }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * n_ + j) * n_ + k; }
  Vec3 position(std::size_t i, std::size_t j, std::size_t k) const {
    return {static_cast<double>(i) * spacing_, static_cast<double>(j) * spacing_,
            static_cast<double>(k) * spacing_};
  }
  Vec3 position(std::size_t flat) const;

  /// Shortest periodic representative of a displacement, components in [-L/2, L/2).
  Vec3 minimum_image(const Vec3& d) const;
  /// Reduce a point into [0, L)^3.
  Vec3 wrap(const Vec3& p) const;

  const FftPlan& fft() const { return *fft_; }

  bool operator==(const Grid& other) const { return n_ == other.n_ && length_ == other.length_; }

 private:
  std::size_t n_;
  double length_;
  double spacing_;
  std::vector<double> k_;
  std::vector<double> kd_;
  std::vector<double> k2_;
  std::shared_ptr<FftPlan> fft_;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace ksnd
