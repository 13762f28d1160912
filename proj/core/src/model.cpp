#include "ksnd/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ksnd/error.hpp"
#include "ksnd/spectral.hpp"

namespace ksnd {

namespace {

constexpr double kNegativeDensityTolerance = 1e-12;

Vec3 image(const Vec3& d, double box_length) {
  if (box_length <= 0.0) return d;
  Vec3 out = d;
  for (auto& c : out) c -= box_length * std::floor(c / box_length + 0.5);
  return out;
}

// Minimum-image displacement (node - x) along each axis; the image reduction
// is separable on a cubic box.
std::array<std::vector<double>, 3> axis_displacements(const Grid& g, const Vec3& x) {
  std::array<std::vector<double>, 3> d;
  const std::size_t n = g.points_per_axis();
  const double L = g.box_length();
  for (int a = 0; a < 3; ++a) {
    d[a].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = static_cast<double>(i) * g.spacing() - x[a];
      d[a][i] = c - L * std::floor(c / L + 0.5);
    }
  }
  return d;
}

double conv_factor(ForceConvention c) { return c == ForceConvention::paper_literal ? 0.5 : 1.0; }

}  // namespace

void NuclearState::validate() const {
  const std::size_t m = positions.size();
  if (velocities.size() != m || masses.size() != m || charges.size() != m) {
    throw InvalidInput("nuclear state: positions, velocities, masses and charges must have equal length");
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (!is_finite(positions[k]) || !is_finite(velocities[k])) {
      throw InvalidInput("nuclear state: non-finite position or velocity for nucleus " + std::to_string(k));
    }
    if (!(masses[k] > 0.0) || !std::isfinite(masses[k])) {
      throw InvalidInput("nuclear state: mass of nucleus " + std::to_string(k) + " must be positive");
    }
    if (charges[k] < 1) {
      throw InvalidInput("nuclear state: charge of nucleus " + std::to_string(k) + " must be >= 1");
    }
  }
  if (m >= 2 && !(min_pair_distance(positions) > 0.0)) {
    throw InvalidInput("nuclear state: coincident nuclei");
  }
}

double min_pair_distance(const std::vector<Vec3>& positions) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < positions.size(); ++k) {
    for (std::size_t l = k + 1; l < positions.size(); ++l) best = std::min(best, norm(positions[k] - positions[l]));
  }
  return best;
}

void ExchangeParams::validate() const {
  if (!(q > 1.0) || !std::isfinite(q)) throw InvalidInput("exchange.q must satisfy q > 1");
  if (!std::isfinite(lambda)) throw InvalidInput("exchange.lambda must be finite");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InvalidInput("softening.epsilon must be >= 0");
}

std::string to_string(ForceConvention c) {
  return c == ForceConvention::paper_literal ? "paper_literal" : "newton_consistent";
}

ForceConvention force_convention_from_string(const std::string& s) {
  if (s == "newton_consistent") return ForceConvention::newton_consistent;
  if (s == "paper_literal") return ForceConvention::paper_literal;
  throw InvalidInput("unknown force convention '" + s + "' (expected newton_consistent or paper_literal)");
}

RealField density(const OrbitalSet& psi) {
  if (psi.empty()) throw InvalidInput("density: empty orbital set");
  RealField rho(psi.front().grid_ptr());
  for (const auto& orb : psi) {
    require_same_grid(rho.grid(), orb.grid());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += std::norm(orb[i]);
  }
  return rho;
}

RealField external_potential(const GridPtr& grid, const std::vector<Vec3>& positions, const std::vector<int>& charges,
                             double eps) {
  if (!(eps >= 0.0)) throw InvalidInput("external_potential: eps must be >= 0");
  if (charges.size() != positions.size()) throw InvalidInput("external_potential: one charge per nucleus required");
  RealField v(grid);
  const double eps2 = eps * eps;
  const std::size_t n = grid->points_per_axis();
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const double z = charges[k];
    const auto d = axis_displacements(*grid, positions[k]);
    std::size_t idx = 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const double rab = d[0][a] * d[0][a] + d[1][b] * d[1][b] + eps2;
        for (std::size_t c = 0; c < n; ++c, ++idx) {
          const double r2 = rab + d[2][c] * d[2][c];
          if (r2 == 0.0) throw InvalidInput("external_potential: grid node coincides with a nucleus and eps = 0");
          v[idx] -= z / std::sqrt(r2);
        }
      }
    }
  }
  return v;
}

RealField external_potential(const GridPtr& grid, const NuclearState& nuc, double eps) {
  return external_potential(grid, nuc.positions, nuc.charges, eps);
}

RealField hartree_potential(const RealField& rho) { return spectral::poisson_hartree(rho); }

RealField exchange_potential(const RealField& rho, const ExchangeParams& xp) {
  if (!(xp.q > 1.0)) throw InvalidInput("exchange_potential: q must exceed 1");
  RealField v(rho.grid_ptr());
  if (xp.lambda == 0.0) return v;
  const double e = xp.q - 1.0;
  // Integer and half-integer exponents avoid pow, which dominates the
  // split step otherwise.
  const double twice = 2.0 * e;
  const bool half_integer = twice == std::floor(twice) && twice <= 16.0;
  const int whole = static_cast<int>(std::floor(e));
  const bool add_sqrt = half_integer && e != std::floor(e);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double r = rho[i];
    if (r < 0.0) {
      if (r < -kNegativeDensityTolerance) throw InvalidInput("exchange_potential: negative density");
      r = 0.0;
    }
    if (r == 0.0) {
      v[i] = 0.0;
    } else if (half_integer) {
      double p = add_sqrt ? std::sqrt(r) : 1.0;
      for (int m = 0; m < whole; ++m) p *= r;
      v[i] = xp.lambda * p;
    } else {
      v[i] = xp.lambda * std::pow(r, e);
    }
  }
  return v;
}

RealField mean_field_potential(const RealField& rho, const Physics& physics) {
  RealField v = exchange_potential(rho, physics.exchange);
  if (physics.hartree) v += hartree_potential(rho);
  return v;
}

OrbitalSet apply_hamiltonian(const NuclearState& nuc, const OrbitalSet& psi, const Physics& physics) {
  if (psi.empty()) return {};
  const GridPtr& grid = psi.front().grid_ptr();
  RealField v = mean_field_potential(density(psi), physics);
  if (nuc.size() > 0) v += external_potential(grid, nuc, physics.exchange.epsilon);
  OrbitalSet out;
  out.reserve(psi.size());
  for (const auto& orb : psi) {
    ComplexField h = spectral::laplacian(orb);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = -0.5 * h[i] + v[i] * orb[i];
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<Vec3> electron_nuclear_accel(const RealField& rho, const NuclearState& nuc, double eps) {
  const Grid& g = rho.grid();
  const std::size_t n = g.points_per_axis();
  const double eps2 = eps * eps;
  std::vector<Vec3> acc(nuc.size(), Vec3{});
  for (std::size_t k = 0; k < nuc.size(); ++k) {
    const auto d = axis_displacements(g, nuc.positions[k]);
    double sx = 0.0, sy = 0.0, sz = 0.0;
    std::size_t idx = 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const double rab = d[0][a] * d[0][a] + d[1][b] * d[1][b] + eps2;
        double wsum = 0.0, wz = 0.0;
        for (std::size_t c = 0; c < n; ++c, ++idx) {
          const double r2 = rab + d[2][c] * d[2][c];
          if (r2 == 0.0) continue;  // odd integrand, contributes nothing
          const double w = rho[idx] / (r2 * std::sqrt(r2));
          wsum += w;
          wz += w * d[2][c];
        }
        sx += wsum * d[0][a];
        sy += wsum * d[1][b];
        sz += wz;
      }
    }
    acc[k] = (static_cast<double>(nuc.charges[k]) / nuc.masses[k] * g.cell_volume()) * Vec3{sx, sy, sz};
  }
  return acc;
}

std::vector<Vec3> electron_nuclear_accel_spectral(const RealField& rho, const NuclearState& nuc) {
  const auto grad = spectral::gradient(hartree_potential(rho));
  std::vector<Vec3> acc(nuc.size());
  for (std::size_t k = 0; k < nuc.size(); ++k) {
    acc[k] = (static_cast<double>(nuc.charges[k]) / nuc.masses[k]) * spectral::interpolate_at(grad, nuc.positions[k]);
  }
  return acc;
}

std::vector<Vec3> internuclear_accel(const NuclearState& nuc, ForceConvention convention, double box_length) {
  const std::size_t m = nuc.size();
  std::vector<Vec3> acc(m, Vec3{});
  const double f = conv_factor(convention);
  for (std::size_t k = 0; k < m; ++k) {
    Vec3 s{};
    for (std::size_t l = 0; l < m; ++l) {
      if (l == k) continue;
      const Vec3 d = image(nuc.positions[k] - nuc.positions[l], box_length);
      const double r = norm(d);
      if (r == 0.0) throw InvalidInput("internuclear_accel: coincident nuclei");
      s += (static_cast<double>(nuc.charges[l]) / (r * r * r)) * d;
    }
    acc[k] = (f * nuc.charges[k] / nuc.masses[k]) * s;
  }
  return acc;
}

double nuclear_repulsion(const NuclearState& nuc, double box_length) {
  double e = 0.0;
  for (std::size_t k = 0; k < nuc.size(); ++k) {
    for (std::size_t l = k + 1; l < nuc.size(); ++l) {
      const double r = norm(image(nuc.positions[k] - nuc.positions[l], box_length));
      if (r == 0.0) throw InvalidInput("nuclear_repulsion: coincident nuclei");
      e += static_cast<double>(nuc.charges[k]) * nuc.charges[l] / r;
    }
  }
  return e;
}

double interaction_energy(const RealField& rho, const NuclearState& nuc, double eps) {
  double e = nuclear_repulsion(nuc, rho.grid().box_length());
  if (nuc.size() == 0) return e;
  const RealField v = external_potential(rho.grid_ptr(), nuc, eps);
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) s += v[i] * rho[i];
  return e + s * rho.grid().cell_volume();
}

std::vector<Vec3> total_accel(const RealField& rho, const NuclearState& nuc, const Physics& physics) {
  auto a = electron_nuclear_accel(rho, nuc, physics.exchange.epsilon);
  const auto a2 = internuclear_accel(nuc, physics.convention, rho.grid().box_length());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += a2[k];
  return a;
}

ForceBoundReport force_bound_check(const OrbitalSet& psi, const NuclearState& nuc) {
  ForceBoundReport rep;
  if (psi.empty()) return rep;
  const Grid& g = psi.front().grid();
  // The charge factor z_k cancels from both ratios, so one pass covers every nucleus.
  (void)nuc;
  std::vector<double> grad_norm(psi.size());
  std::vector<double> h2(psi.size());
  std::vector<std::array<ComplexField, 3>> grads;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    grads.push_back(spectral::gradient(psi[j]));
    double s = 0.0;
    for (const auto& c : grads.back()) s += std::pow(spectral::l2_norm(c), 2);
    grad_norm[j] = std::sqrt(s);
    h2[j] = std::hypot(spectral::l2_norm(psi[j]), spectral::l2_norm(spectral::laplacian(psi[j])));
  }
  for (std::size_t i = 0; i < psi.size(); ++i) {
    for (std::size_t j = 0; j < psi.size(); ++j) {
      ComplexField src(psi[i].grid_ptr());
      for (std::size_t p = 0; p < src.size(); ++p) src[p] = std::conj(psi[i][p]) * psi[j][p];
      const ComplexField G = spectral::poisson_hartree(src);
      const auto dG = spectral::gradient(G);
      double sup_f = 0.0;
      double sup_imag = 0.0;
      for (std::size_t p = 0; p < g.size(); ++p) {
        double s = 0.0;
        double im = 0.0;
        for (int a = 0; a < 3; ++a) {
          s += std::norm(dG[a][p]);
          im = std::max(im, std::abs(dG[a][p].imag()));
        }
        sup_f = std::max(sup_f, std::sqrt(s));
        sup_imag = std::max(sup_imag, im);
      }
      std::vector<double> hess(g.size(), 0.0);
      for (int a = 0; a < 3; ++a) {
        const auto d2 = spectral::gradient(dG[a]);
        for (int b = 0; b < 3; ++b) {
          for (std::size_t p = 0; p < g.size(); ++p) hess[p] += std::norm(d2[b][p]);
        }
      }
      const double sup_df = std::sqrt(*std::max_element(hess.begin(), hess.end()));
      const double rhs1 = grad_norm[i] * grad_norm[j];
      const double rhs2 = h2[i] * h2[j];
      if (rhs1 > 0.0) rep.ratio_value = std::max(rep.ratio_value, sup_f / rhs1);
      if (rhs2 > 0.0) rep.ratio_derivative = std::max(rep.ratio_derivative, sup_df / rhs2);
      if (i == j && sup_f > 0.0) rep.diagonal_imag_residue = std::max(rep.diagonal_imag_residue, sup_imag / sup_f);
      rep.evaluations += g.size();
    }
  }
  return rep;
}

}  // namespace ksnd
