#pragma once

#include <complex>
#include <new>
#include <span>
#include <vector>

#include "ksnd/grid.hpp"

namespace ksnd {

using Complex = std::complex<double>;

/// 64-byte aligned storage so FFT plans can use their SIMD kernels.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{64})); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t{64}); }
  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

/// Scalar samples on a Grid. `T` is double for densities and potentials,
/// Complex for orbitals.
template <typename T>
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size(), T{}) {}
  using Storage = std::vector<T, AlignedAllocator<T>>;
  Field(GridPtr grid, Storage values);
  Field(GridPtr grid, const std::vector<T>& values) : Field(std::move(grid), Storage(values.begin(), values.end())) {}

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  bool empty() const { return !grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  bool all_finite() const;
  /// Throws NonFiniteError naming `what` if any sample is NaN/Inf.
  void require_finite(const char* what) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(T scalar);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(T s, Field a) { return a *= s; }

 private:
  GridPtr grid_;
  Storage values_;
};

using ComplexBuffer = std::vector<Complex, AlignedAllocator<Complex>>;

using RealField = Field<double>;
using ComplexField = Field<Complex>;

/// Throws InvalidInput unless both fields live on equal grids.
void require_same_grid(const Grid& a, const Grid& b);

ComplexField to_complex(const RealField& f);
RealField real_part(const ComplexField& f);
RealField abs_field(const ComplexField& f);

extern template class Field<double>;
extern template class Field<Complex>;

}  // namespace ksnd
