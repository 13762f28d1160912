#include "ksnd/field.hpp"

#include <cmath>
#include <string>

#include "ksnd/error.hpp"

namespace ksnd {

namespace {

bool finite(double v) { return std::isfinite(v); }
bool finite(const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

}  // namespace

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw InvalidInput("fields live on different grids");
}

template <typename T>
Field<T>::Field(GridPtr grid, Storage values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) {
    throw InvalidInput("field has " + std::to_string(values_.size()) + " samples, grid needs " +
                       std::to_string(grid_->size()));
  }
}

template <typename T>
bool Field<T>::all_finite() const {
  for (const auto& v : values_) {
    if (!finite(v)) return false;
  }
  return true;
}

template <typename T>
void Field<T>::require_finite(const char* what) const {
  if (!all_finite()) throw NonFiniteError(std::string(what) + ": non-finite field value");
}

template <typename T>
Field<T>& Field<T>::operator+=(const Field& other) {
  require_same_grid(*grid_, *other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

template <typename T>
Field<T>& Field<T>::operator-=(const Field& other) {
  require_same_grid(*grid_, *other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

template <typename T>
Field<T>& Field<T>::operator*=(T scalar) {
  for (auto& v : values_) v *= scalar;
  return *this;
}

template class Field<double>;
template class Field<Complex>;

ComplexField to_complex(const RealField& f) {
  ComplexField out(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  return out;
}

RealField real_part(const ComplexField& f) {
  RealField out(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

RealField abs_field(const ComplexField& f) {
  RealField out(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::abs(f[i]);
  return out;
}

}  // namespace ksnd
