#include "ksnd/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "ksnd/error.hpp"

namespace ksnd {

namespace {

// FFTW's planner is not thread-safe; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

FftPlan::FftPlan(std::size_t points_per_axis) : n_(points_per_axis) {
  const int n = static_cast<int>(n_);
  std::lock_guard lock(planner_mutex());
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_ * n_ * n_));
  if (buf == nullptr) throw std::bad_alloc();
  // ESTIMATE plans are deterministic and do not touch the buffer. The
  // unaligned pair serves spans that miss SIMD alignment.
  const unsigned flags = FFTW_ESTIMATE;
  forward_plan_ = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_BACKWARD, flags);
  forward_unaligned_ = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_FORWARD, flags | FFTW_UNALIGNED);
  backward_unaligned_ = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_BACKWARD, flags | FFTW_UNALIGNED);
  fftw_free(buf);
  if (!forward_plan_ || !backward_plan_ || !forward_unaligned_ || !backward_unaligned_) {
    throw std::runtime_error("FFTW failed to create a plan of size " + std::to_string(n_));
  }
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  for (void* p : {forward_plan_, backward_plan_, forward_unaligned_, backward_unaligned_}) {
    fftw_destroy_plan(static_cast<fftw_plan>(p));
  }
}

void FftPlan::forward(std::span<std::complex<double>> data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  const void* plan = fftw_alignment_of(reinterpret_cast<double*>(buf)) == 0 ? forward_plan_ : forward_unaligned_;
  fftw_execute_dft(static_cast<fftw_plan>(const_cast<void*>(plan)), buf, buf);
}

void FftPlan::backward(std::span<std::complex<double>> data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  const void* plan = fftw_alignment_of(reinterpret_cast<double*>(buf)) == 0 ? backward_plan_ : backward_unaligned_;
  fftw_execute_dft(static_cast<fftw_plan>(const_cast<void*>(plan)), buf, buf);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

Grid::Grid(std::size_t points_per_axis, double box_length)
    : n_(points_per_axis), length_(box_length), spacing_(box_length / static_cast<double>(points_per_axis)) {
  if (n_ < 8 || !is_power_of_two(n_)) {
    throw InvalidInput("grid.n must be a power of two >= 8, got " + std::to_string(n_));
  }
  if (!(std::isfinite(length_) && length_ > 0.0)) {
    throw InvalidInput("grid.box_length must be positive and finite");
  }
  const double base = 2.0 * std::numbers::pi / length_;
  const auto half = static_cast<long>(n_ / 2);
  k_.resize(n_);
  kd_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const long m = static_cast<long>(i) < half ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n_);
    k_[i] = base * static_cast<double>(m);
    kd_[i] = (m == -half) ? 0.0 : k_[i];
  }
  k2_.resize(size());
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t k = 0; k < n_; ++k) {
        k2_[index(i, j, k)] = k_[i] * k_[i] + k_[j] * k_[j] + k_[k] * k_[k];
      }
    }
  }
  fft_ = std::make_shared<FftPlan>(n_);
}

Vec3 Grid::position(std::size_t flat) const {
  const std::size_t k = flat % n_;
  const std::size_t j = (flat / n_) % n_;
  const std::size_t i = flat / (n_ * n_);
  return position(i, j, k);
}

Vec3 Grid::minimum_image(const Vec3& d) const {
  Vec3 out = d;
  for (auto& c : out) {
    c -= length_ * std::floor(c / length_ + 0.5);
  }
  return out;
}

Vec3 Grid::wrap(const Vec3& p) const {
  Vec3 out = p;
  for (auto& c : out) {
    c -= length_ * std::floor(c / length_);
    if (c >= length_) c -= length_;
  }
  return out;
}

}  // namespace ksnd
