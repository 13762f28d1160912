#include "ksnd/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "ksnd/error.hpp"
#include "ksnd/spectral.hpp"

namespace ksnd {

double h2_norm(const ComplexField& f) {
  return std::hypot(spectral::l2_norm(f), spectral::l2_norm(spectral::laplacian(f)));
}

double h2_norm(const OrbitalSet& psi) {
  double s = 0.0;
  for (const auto& p : psi) s += std::pow(h2_norm(p), 2);
  return std::sqrt(s);
}

double gradient_l2_norm(const ComplexField& f) {
  double s = 0.0;
  for (const auto& c : spectral::gradient(f)) s += std::pow(spectral::l2_norm(c), 2);
  return std::sqrt(s);
}

double h1_norm(const ComplexField& f) { return std::hypot(spectral::l2_norm(f), gradient_l2_norm(f)); }

double l2_norm(const OrbitalSet& psi) {
  double s = 0.0;
  for (const auto& p : psi) s += std::pow(spectral::l2_norm(p), 2);
  return std::sqrt(s);
}

namespace {

template <typename F>
double lp_impl(std::size_t n, double dv, double p, F&& absval) {
  if (!(p >= 1.0)) throw InvalidInput("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, absval(i));
    return m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::pow(absval(i), p);
  return std::pow(s * dv, 1.0 / p);
}

}  // namespace

double lp_norm(const RealField& f, double p) {
  return lp_impl(f.size(), f.grid().cell_volume(), p, [&](std::size_t i) { return std::abs(f[i]); });
}

double lp_norm(const ComplexField& f, double p) {
  return lp_impl(f.size(), f.grid().cell_volume(), p, [&](std::size_t i) { return std::abs(f[i]); });
}

double lp_norm(const OrbitalSet& psi, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& o : psi) m = std::max(m, lp_norm(o, p));
    return m;
  }
  double s = 0.0;
  for (const auto& o : psi) s += std::pow(lp_norm(o, p), p);
  return std::pow(s, 1.0 / p);
}

double lorentz_quasinorm(std::span<const double> abs_values, double cell_volume, double p) {
  if (!(p >= 1.0)) throw InvalidInput("lorentz_quasinorm: p must be >= 1");
  std::vector<double> v(abs_values.begin(), abs_values.end());
  std::sort(v.begin(), v.end(), std::greater<>());
  // f* equals v[i] on (i dV, (i+1) dV]; t^{1/p} grows on each step, so the
  // supremum over the step is taken at its right end.
  double best = 0.0;
  const double inv_p = 1.0 / p;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] <= 0.0) break;
    best = std::max(best, std::pow(static_cast<double>(i + 1) * cell_volume, inv_p) * v[i]);
  }
  return best;
}

double lorentz_quasinorm(const RealField& f, double p) {
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::abs(f[i]);
  return lorentz_quasinorm(a, f.grid().cell_volume(), p);
}

double lorentz_quasinorm(const ComplexField& f, double p) {
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::abs(f[i]);
  return lorentz_quasinorm(a, f.grid().cell_volume(), p);
}

double lorentz_quasinorm(const OrbitalSet& psi, double p) {
  double s = 0.0;
  for (const auto& o : psi) s += lorentz_quasinorm(o, p);
  return s;
}

RealField gradient_star(const OrbitalSet& psi) {
  if (psi.empty()) throw InvalidInput("gradient_star: empty orbital set");
  RealField out(psi.front().grid_ptr());
  for (const auto& o : psi) {
    for (const auto& c : spectral::gradient(o)) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += std::norm(c[i]);
    }
  }
  for (auto& v : out.values()) v = std::sqrt(v);
  return out;
}

NormReport norm_report(const OrbitalSet& psi, double lq, double lorentz_p) {
  NormReport r;
  for (const auto& o : psi) {
    r.l2.push_back(spectral::l2_norm(o));
    r.h2.push_back(h2_norm(o));
    if (lorentz_p > 0.0) r.lorentz.push_back(lorentz_quasinorm(o, lorentz_p));
  }
  const RealField g = gradient_star(psi);
  double sum = 0.0;
  for (double v : g.values()) {
    r.gradient_star.max = std::max(r.gradient_star.max, v);
    sum += v;
  }
  r.gradient_star.mean = sum / static_cast<double>(g.size());
  r.gradient_star.l2 = spectral::l2_norm(g);
  const RealField rho = density(psi);
  r.rho_l1 = lp_norm(rho, 1.0);
  r.rho_lq = lp_norm(rho, lq);
  return r;
}

}  // namespace ksnd
