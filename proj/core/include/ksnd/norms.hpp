#pragma once

#include <vector>

#include "ksnd/model.hpp"

namespace ksnd {

/// ||f||_H2^2 = ||f||^2 + ||Delta f||^2 (no gradient term).
double h2_norm(const ComplexField& f);
/// Product norm sqrt(sum_j ||psi_j||_H2^2).
double h2_norm(const OrbitalSet& psi);
/// ||f||_H1^2 = ||f||^2 + ||grad f||^2.
double h1_norm(const ComplexField& f);
double gradient_l2_norm(const ComplexField& f);

double l2_norm(const OrbitalSet& psi);
/// Discrete L^p norm (dV sum |f|^p)^{1/p}; p = +inf gives the max.
double lp_norm(const RealField& f, double p);
double lp_norm(const ComplexField& f, double p);
/// (sum_j ||psi_j||_p^p)^{1/p}, the pointwise l2-in-j norm is not used here.
double lp_norm(const OrbitalSet& psi, double p);

/// Weak-L^p quasinorm sup_t t^{1/p} f*(t) with f* the decreasing step
/// rearrangement of |values| carrying cell_volume per sample.
double lorentz_quasinorm(std::span<const double> abs_values, double cell_volume, double p);
double lorentz_quasinorm(const RealField& f, double p);
double lorentz_quasinorm(const ComplexField& f, double p);
/// sum_j ||psi_j||_{p,inf}
double lorentz_quasinorm(const OrbitalSet& psi, double p);

/// Pointwise ||grad psi||_* = sqrt(sum_j |grad psi_j|^2).
RealField gradient_star(const OrbitalSet& psi);

struct GradientStats {
  double max = 0.0;
  double mean = 0.0;
  double l2 = 0.0;
};

struct NormReport {
  std::vector<double> l2;
  std::vector<double> h2;
  GradientStats gradient_star;
  double rho_l1 = 0.0;
  double rho_lq = 0.0;
  std::vector<double> lorentz;  // per orbital, when requested
};

/// `lq` is the exponent used for the rho L^q entry; `lorentz_p` <= 0 skips
/// the Lorentz quasinorms.
NormReport norm_report(const OrbitalSet& psi, double lq, double lorentz_p = 0.0);

}  // namespace ksnd
