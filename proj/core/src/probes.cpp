#include "ksnd/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ksnd/error.hpp"
#include "ksnd/norms.hpp"
#include "ksnd/spectral.hpp"

namespace ksnd {

namespace {

constexpr double kTiny = 1e-300;

double ratio_of(double lhs, double rhs) {
  if (rhs > kTiny) return lhs / rhs;
  return lhs > kTiny ? std::numeric_limits<double>::infinity() : 0.0;
}

InequalityResult named(std::string name) {
  InequalityResult r;
  r.name = std::move(name);
  return r;
}

void push(InequalityResult& r, double lhs, double rhs) {
  r.lhs.push_back(lhs);
  r.rhs.push_back(rhs);
  r.ratios.push_back(ratio_of(lhs, rhs));
}

void finish(InequalityResult& r, const ProbeSettings& ps) {
  const std::size_t cal = ps.calibrate > 0 ? ps.calibrate : r.ratios.size() / 2;
  r.split = split_sample(r.ratios, cal, ps.margin);
  r.max_ratio = r.ratios.empty() ? 0.0 : *std::max_element(r.ratios.begin(), r.ratios.end());
}

/// V, grad V and Delta V at the nodes.
struct PotentialFactor {
  RealField v;
  std::array<RealField, 3> grad;
  RealField lap;
};

void add_into(PotentialFactor& a, const PotentialFactor& b) {
  a.v += b.v;
  for (int d = 0; d < 3; ++d) a.grad[d] += b.grad[d];
  a.lap += b.lap;
}

PotentialFactor hartree_factor(const RealField& rho) {
  PotentialFactor f;
  f.v = hartree_potential(rho);
  f.grad = spectral::gradient(f.v);
  f.lap = spectral::laplacian(f.v);
  return f;
}

/// lambda rho^(q-1) with derivatives from grad rho = sum 2 Re(conj psi grad psi)
/// and Delta rho = sum 2 Re(conj psi Delta psi) + 2 |grad psi|^2.
PotentialFactor exchange_factor(const OrbitalSet& psi, const ExchangeParams& xp) {
  const GridPtr& grid = psi.front().grid_ptr();
  const std::size_t n = grid->size();
  RealField rho(grid);
  std::array<RealField, 3> grho{RealField(grid), RealField(grid), RealField(grid)};
  RealField lrho(grid);
  for (const auto& p : psi) {
    const auto g = spectral::gradient(p);
    const auto l = spectral::laplacian(p);
    for (std::size_t i = 0; i < n; ++i) {
      rho[i] += std::norm(p[i]);
      double grad2 = 0.0;
      for (int d = 0; d < 3; ++d) {
        grho[d][i] += 2.0 * (std::conj(p[i]) * g[d][i]).real();
        grad2 += std::norm(g[d][i]);
      }
      lrho[i] += 2.0 * (std::conj(p[i]) * l[i]).real() + 2.0 * grad2;
    }
  }
  const double q = xp.q;
  const double lam = xp.lambda;
  PotentialFactor f{RealField(grid), {RealField(grid), RealField(grid), RealField(grid)}, RealField(grid)};
  for (std::size_t i = 0; i < n; ++i) {
    const double r = rho[i];
    if (r <= 0.0) continue;
    const double p1 = std::pow(r, q - 1.0);
    const double p2 = p1 / r;
    const double p3 = p2 / r;
    f.v[i] = lam * p1;
    double g2 = 0.0;
    for (int d = 0; d < 3; ++d) {
      f.grad[d][i] = lam * (q - 1.0) * p2 * grho[d][i];
      g2 += grho[d][i] * grho[d][i];
    }
    f.lap[i] = lam * (q - 1.0) * (p2 * lrho[i] + (q - 2.0) * p3 * g2);
  }
  return f;
}

/// sqrt(sum_j ||f_j||^2 + ||Delta f_j||^2) for f_j = V psi_j - V' psi'_j.
/// An empty `b` drops the primed term.
double product_difference_h2(const PotentialFactor& fa, const OrbitalSet& a, const PotentialFactor* fb,
                             const OrbitalSet* b) {
  double total = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    ComplexField f = a[j];
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= fa.v[i];
    ComplexField lf = collocated_product_laplacian(fa.v, fa.grad, fa.lap, a[j]);
    if (fb != nullptr) {
      for (std::size_t i = 0; i < f.size(); ++i) f[i] -= fb->v[i] * (*b)[j][i];
      lf -= collocated_product_laplacian(fb->v, fb->grad, fb->lap, (*b)[j]);
    }
    total += std::pow(spectral::l2_norm(f), 2) + std::pow(spectral::l2_norm(lf), 2);
  }
  return std::sqrt(total);
}

OrbitalSet difference(const OrbitalSet& a, const OrbitalSet& b) {
  OrbitalSet d = a;
  for (std::size_t j = 0; j < a.size(); ++j) d[j] -= b[j];
  return d;
}

/// Pointwise sqrt(sum_j |a_j - b_j|^2).
std::vector<double> pointwise_distance(const OrbitalSet& a, const OrbitalSet& b) {
  std::vector<double> out(a.front().size(), 0.0);
  for (std::size_t j = 0; j < a.size(); ++j) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += std::norm(a[j][i] - b[j][i]);
  }
  for (auto& x : out) x = std::sqrt(x);
  return out;
}

std::string describe(const ProbeSettings& ps, const Grid& g) {
  std::ostringstream os;
  os << "grid " << g.points_per_axis() << "^3 L=" << g.box_length() << ", " << ps.samples << " samples, "
     << ps.orbitals << " orbital(s), H2 radius " << ps.radius << ", cutoff " << ps.cutoff_fraction << ", seed "
     << ps.seed;
  return os.str();
}

void require_settings(const ProbeSettings& ps) {
  if (ps.samples < 2) throw InvalidInput("probe: need at least 2 samples");
  if (ps.orbitals == 0) throw InvalidInput("probe: need at least one orbital");
  if (!(ps.radius > 0.0) || !std::isfinite(ps.radius)) throw InvalidInput("probe: H2 radius must be positive");
  if (!(ps.margin >= 1.0)) throw InvalidInput("probe: margin must be at least 1");
  if (ps.calibrate >= ps.samples) throw InvalidInput("probe: calibration set leaves nothing to assert");
}

}  // namespace

SplitSample split_sample(const std::vector<double>& ratios, std::size_t calibrate, double margin) {
  if (calibrate == 0 || calibrate >= ratios.size()) {
    throw InvalidInput("split_sample: calibration size must be in [1, n)");
  }
  SplitSample s;
  s.calibrate = calibrate;
  s.asserted = ratios.size() - calibrate;
  s.margin = margin;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!std::isfinite(ratios[i])) s.all_finite = false;
    if (i < calibrate) {
      s.calibrated = std::max(s.calibrated, ratios[i]);
    } else {
      s.max_asserted = std::max(s.max_asserted, ratios[i]);
    }
  }
  for (std::size_t i = calibrate; i < ratios.size(); ++i) {
    if (!(ratios[i] <= margin * s.calibrated)) ++s.violations;
  }
  return s;
}

bool ProbeReport::pass() const {
  return std::all_of(inequalities.begin(), inequalities.end(), [](const auto& r) { return r.split.pass(); });
}

const InequalityResult& ProbeReport::get(const std::string& name) const {
  for (const auto& r : inequalities) {
    if (r.name == name) return r;
  }
  throw InvalidInput("probe report has no inequality named " + name);
}

StatePair random_pair(const GridPtr& grid, Rng& rng, const ProbeSettings& ps) {
  const double per = ps.radius / std::sqrt(static_cast<double>(ps.orbitals));
  std::uniform_real_distribution<double> decades(-3.0, 0.0);
  const double eta = ps.radius * std::pow(10.0, decades(rng));
  StatePair pr;
  for (std::size_t j = 0; j < ps.orbitals; ++j) {
    pr.a.push_back(random_h2_field(grid, rng, per, ps.cutoff_fraction));
  }
  pr.b = pr.a;
  for (std::size_t j = 0; j < ps.orbitals; ++j) {
    pr.b[j] += eta * random_h2_field(grid, rng, 1.0 / std::sqrt(static_cast<double>(ps.orbitals)),
                                     ps.cutoff_fraction);
  }
  return pr;
}

ComplexField collocated_product_laplacian(const RealField& v, const std::array<RealField, 3>& grad_v,
                                          const RealField& lap_v, const ComplexField& psi) {
  const auto g = spectral::gradient(psi);
  ComplexField out = spectral::laplacian(psi);
  for (std::size_t i = 0; i < out.size(); ++i) {
    Complex dot_term = 0.0;
    for (int d = 0; d < 3; ++d) dot_term += grad_v[d][i] * g[d][i];
    out[i] = v[i] * out[i] + 2.0 * dot_term + lap_v[i] * psi[i];
  }
  return out;
}

double exchange_difference_h2(const OrbitalSet& a, const OrbitalSet& b, const ExchangeParams& xp) {
  const auto fa = exchange_factor(a, xp);
  const auto fb = exchange_factor(b, xp);
  return product_difference_h2(fa, a, &fb, &b);
}

double hartree_difference_h2(const OrbitalSet& a, const OrbitalSet& b) {
  const auto fa = hartree_factor(density(a));
  const auto fb = hartree_factor(density(b));
  return product_difference_h2(fa, a, &fb, &b);
}

double exchange_bound_function(double s, const ExchangeParams& xp) {
  return std::abs(xp.lambda) * std::pow(s, 2.0 * (xp.q - 1.0));
}

double combined_bound_function(double s, std::size_t n_orbitals, const ExchangeParams& xp) {
  return std::sqrt(static_cast<double>(n_orbitals)) * s * s + exchange_bound_function(s, xp);
}

ProbeReport lipschitz_probe_hartree(const GridPtr& grid, const ProbeSettings& ps) {
  require_settings(ps);
  Rng rng(ps.seed);
  ProbeReport rep;
  rep.probe = "hartree";
  rep.seed = ps.seed;
  rep.samples = ps.samples;
  rep.provenance = describe(ps, *grid);
  InequalityResult A = named("A"), B = named("B"), C = named("C");
  const double sqn = std::sqrt(static_cast<double>(ps.orbitals));

  for (std::size_t s = 0; s < ps.samples; ++s) {
    const StatePair pr = random_pair(grid, rng, ps);
    const auto fa = hartree_factor(density(pr.a));
    const auto fb = hartree_factor(density(pr.b));

    double lhs_a = 0.0;
    for (std::size_t j = 0; j < pr.a.size(); ++j) {
      ComplexField d = pr.a[j];
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = fa.v[i] * pr.a[j][i] - fb.v[i] * pr.b[j][i];
      lhs_a += std::pow(spectral::l2_norm(d), 2);
    }
    lhs_a = std::sqrt(lhs_a);

    const OrbitalSet diff = difference(pr.a, pr.b);
    const double l2_b = l2_norm(pr.b);
    double sum_grad = 0.0;
    double sum_self = 0.0;
    double sum_h1 = 0.0;
    double sum_h1_sq = 0.0;
    for (std::size_t j = 0; j < pr.a.size(); ++j) {
      const double ga = gradient_l2_norm(pr.a[j]);
      sum_grad += ga + gradient_l2_norm(pr.b[j]);
      sum_self += spectral::l2_norm(pr.a[j]) * ga;
      const double h1a = h1_norm(pr.a[j]);
      sum_h1 += (h1a + h1_norm(pr.b[j])) * h2_norm(pr.b);
      sum_h1_sq += h1a * h1a;
    }
    push(A, lhs_a, sqn * l2_norm(diff) * (sum_grad * l2_b + sum_self));
    push(B, product_difference_h2(fa, pr.a, nullptr, nullptr), sqn * sum_h1_sq * h2_norm(pr.a));
    push(C, product_difference_h2(fa, pr.a, &fb, &pr.b), sqn * h2_norm(diff) * (sum_h1 + sum_h1_sq));
  }
  for (auto* r : {&A, &B, &C}) {
    finish(*r, ps);
    rep.inequalities.push_back(std::move(*r));
  }
  return rep;
}

ProbeReport lipschitz_probe_exchange(const GridPtr& grid, const ExchangeParams& xp, const ProbeSettings& ps,
                                     double lp) {
  require_settings(ps);
  xp.validate();
  if (!(lp >= 1.0)) throw InvalidInput("exchange probe: L^p exponent must be at least 1");
  Rng rng(ps.seed);
  ProbeReport rep;
  rep.probe = "exchange";
  rep.seed = ps.seed;
  rep.samples = ps.samples;
  {
    std::ostringstream os;
    os << describe(ps, *grid) << ", lambda " << xp.lambda << ", q " << xp.q << ", L^p p=" << lp
       << ", L(s)=|lambda| s^(2(q-1)), Lscript(s)=sqrt(N) s^2 + L(s)";
    rep.provenance = os.str();
  }
  InequalityResult D = named("D"), E = named("E"), F = named("F"), G = named("G");
  const double e = 2.0 * (xp.q - 1.0);

  for (std::size_t s = 0; s < ps.samples; ++s) {
    const StatePair pr = random_pair(grid, rng, ps);
    const auto xa = exchange_factor(pr.a, xp);
    const auto xb = exchange_factor(pr.b, xp);
    const OrbitalSet diff = difference(pr.a, pr.b);
    const double h2a = h2_norm(pr.a);
    const double h2b = h2_norm(pr.b);
    const double h2d = h2_norm(diff);

    OrbitalSet dx = pr.a;
    for (std::size_t j = 0; j < dx.size(); ++j) {
      for (std::size_t i = 0; i < dx[j].size(); ++i) dx[j][i] = xa.v[i] * pr.a[j][i] - xb.v[i] * pr.b[j][i];
    }
    double weight = 0.0;
    for (std::size_t j = 0; j < pr.a.size(); ++j) {
      weight += std::pow(h2_norm(pr.a[j]), e) + std::pow(h2_norm(pr.b[j]), e);
    }
    push(D, lp_norm(dx, lp), std::abs(xp.lambda) * weight * lp_norm(diff, lp));
    push(E, product_difference_h2(xa, pr.a, &xb, &pr.b), exchange_bound_function(std::max(h2a, h2b), xp) * h2d);

    auto ha = hartree_factor(density(pr.a));
    auto hb = hartree_factor(density(pr.b));
    add_into(ha, xa);
    add_into(hb, xb);
    push(F, product_difference_h2(ha, pr.a, &hb, &pr.b),
         combined_bound_function(std::max(h2a, h2b), ps.orbitals, xp) * h2d);
    push(G, product_difference_h2(ha, pr.a, nullptr, nullptr), h2a * combined_bound_function(h2a, ps.orbitals, xp));
  }
  for (auto* r : {&D, &E, &F, &G}) {
    finish(*r, ps);
    rep.inequalities.push_back(std::move(*r));
  }
  return rep;
}

ThresholdSweep exchange_threshold_sweep(const GridPtr& grid, double q, const std::vector<double>& min_densities,
                                        std::uint64_t seed, double perturbation) {
  if (min_densities.size() < 2) throw InvalidInput("threshold sweep: need at least two densities");
  ExchangeParams xp;
  xp.lambda = 1.0;
  xp.q = q;
  xp.validate();
  Rng rng(seed);
  const ComplexField xi = random_h2_field(grid, rng, 1.0);
  const double two_pi_over_l = 2.0 * std::numbers::pi / grid->box_length();

  ThresholdSweep out;
  out.q = q;
  for (const double m : min_densities) {
    if (!(m > 0.0)) throw InvalidInput("threshold sweep: minimum densities must be positive");
    ComplexField psi(grid);
    for (std::size_t i = 0; i < psi.size(); ++i) {
      psi[i] = Complex(std::sin(two_pi_over_l * grid->position(i)[0]), std::sqrt(m));
    }
    ComplexField pert = psi;
    pert += perturbation * xi;
    const OrbitalSet a{psi};
    const OrbitalSet b{pert};
    const double lhs = exchange_difference_h2(a, b, xp);
    const double rhs = exchange_bound_function(std::max(h2_norm(a), h2_norm(b)), xp) * h2_norm(difference(a, b));
    out.min_density.push_back(m);
    out.ratios.push_back(ratio_of(lhs, rhs));
  }
  out.growth = out.ratios.back() / out.ratios.front();
  const auto [lo, hi] = std::minmax_element(out.ratios.begin(), out.ratios.end());
  out.spread = *hi / *lo;
  return out;
}

InequalityResult mve_pair_ratios(const std::vector<StatePair>& pairs, double alpha) {
  if (!(alpha >= 0.5)) throw InvalidInput("mean-value estimate needs alpha >= 1/2");
  std::ostringstream name;
  name << "mve alpha=" << alpha;
  InequalityResult r = named(name.str());
  const bool sharp = alpha == 0.5;
  for (const auto& pr : pairs) {
    const RealField ra = density(pr.a);
    const RealField rb = density(pr.b);
    const auto dist = pointwise_distance(pr.a, pr.b);
    double wa = 1.0;
    double wb = 0.0;
    if (!sharp) {
      wa = std::pow(lp_norm(ra, std::numeric_limits<double>::infinity()), alpha - 0.5);
      wb = std::pow(lp_norm(rb, std::numeric_limits<double>::infinity()), alpha - 0.5);
    }
    double worst = 0.0;
    double wl = 0.0;
    double wr = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (dist[i] <= kTiny) continue;
      const double lhs = std::abs(std::pow(ra[i], alpha) - std::pow(rb[i], alpha));
      const double rhs = (wa + wb) * dist[i];
      const double q = ratio_of(lhs, rhs);
      if (q > worst) {
        worst = q;
        wl = lhs;
        wr = rhs;
      }
    }
    r.lhs.push_back(wl);
    r.rhs.push_back(wr);
    r.ratios.push_back(worst);
  }
  r.max_ratio = r.ratios.empty() ? 0.0 : *std::max_element(r.ratios.begin(), r.ratios.end());
  return r;
}

InequalityResult mve_gradient_pair_ratios(const std::vector<StatePair>& pairs, double beta) {
  if (!(beta >= 1.5)) throw InvalidInput("gradient mean-value estimate needs beta >= 3/2");
  std::ostringstream name;
  name << "mve-gradient beta=" << beta;
  InequalityResult r = named(name.str());

  struct Pieces {
    RealField rho;
    std::array<RealField, 3> grad_rho;
    std::vector<std::array<ComplexField, 3>> grads;
  };
  const auto pieces = [](const OrbitalSet& psi) {
    const GridPtr& g = psi.front().grid_ptr();
    Pieces p{density(psi), {RealField(g), RealField(g), RealField(g)}, {}};
    for (const auto& f : psi) {
      p.grads.push_back(spectral::gradient(f));
      for (int d = 0; d < 3; ++d) {
        for (std::size_t i = 0; i < f.size(); ++i) p.grad_rho[d][i] += 2.0 * (std::conj(f[i]) * p.grads.back()[d][i]).real();
      }
    }
    return p;
  };

  for (const auto& pr : pairs) {
    const Pieces a = pieces(pr.a);
    const Pieces b = pieces(pr.b);
    const auto dist = pointwise_distance(pr.a, pr.b);
    double worst = 0.0;
    double wl = 0.0;
    double wr = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      const double ra = std::max(a.rho[i], 0.0);
      const double rb = std::max(b.rho[i], 0.0);
      const double ca = beta * std::pow(ra, beta - 1.0);
      const double cb = beta * std::pow(rb, beta - 1.0);
      double lhs2 = 0.0;
      for (int d = 0; d < 3; ++d) lhs2 += std::pow(ca * a.grad_rho[d][i] - cb * b.grad_rho[d][i], 2);
      double ga = 0.0;
      double gb = 0.0;
      double gd = 0.0;
      for (std::size_t j = 0; j < a.grads.size(); ++j) {
        for (int d = 0; d < 3; ++d) {
          ga += std::norm(a.grads[j][d][i]);
          gb += std::norm(b.grads[j][d][i]);
          gd += std::norm(a.grads[j][d][i] - b.grads[j][d][i]);
        }
      }
      const double q1 = std::pow(ra, beta - 1.0);
      const double q2 = std::sqrt(rb) * (std::pow(ra, beta - 1.5) + std::pow(rb, beta - 1.5));
      const double q3 = std::pow(ra, beta - 1.0) * std::sqrt(rb);
      const double rhs = (q1 * std::sqrt(ga) + q2 * std::sqrt(gb)) * dist[i] + q3 * std::sqrt(gd);
      const double lhs = std::sqrt(lhs2);
      if (lhs <= kTiny && rhs <= kTiny) continue;
      const double q = ratio_of(lhs, rhs);
      if (q > worst) {
        worst = q;
        wl = lhs;
        wr = rhs;
      }
    }
    r.lhs.push_back(wl);
    r.rhs.push_back(wr);
    r.ratios.push_back(worst);
  }
  r.max_ratio = r.ratios.empty() ? 0.0 : *std::max_element(r.ratios.begin(), r.ratios.end());
  return r;
}

ProbeReport mve_probe(const GridPtr& grid, const std::vector<double>& alphas, const std::vector<double>& betas,
                      const ProbeSettings& ps) {
  require_settings(ps);
  Rng rng(ps.seed);
  std::vector<StatePair> pairs;
  pairs.reserve(ps.samples);
  std::uniform_real_distribution<double> scale(0.5, 1.5);
  for (std::size_t s = 0; s < ps.samples; ++s) {
    StatePair pr = random_pair(grid, rng, ps);
    // Every tenth pair is a positive multiple, where the alpha = 1/2 bound is attained.
    if (s % 10 == 0) {
      const double c = scale(rng);
      pr.b = pr.a;
      for (auto& f : pr.b) f *= Complex(c, 0.0);
    }
    pairs.push_back(std::move(pr));
  }
  ProbeReport rep;
  rep.probe = "mve";
  rep.seed = ps.seed;
  rep.samples = ps.samples;
  rep.provenance = describe(ps, *grid) + ", every tenth pair a positive multiple";
  for (const double a : alphas) {
    auto r = mve_pair_ratios(pairs, a);
    finish(r, ps);
    rep.inequalities.push_back(std::move(r));
  }
  for (const double b : betas) {
    auto r = mve_gradient_pair_ratios(pairs, b);
    finish(r, ps);
    rep.inequalities.push_back(std::move(r));
  }
  return rep;
}

ProbeReport force_probe(const GridPtr& grid, const ProbeSettings& ps) {
  require_settings(ps);
  Rng rng(ps.seed);
  ProbeReport rep;
  rep.probe = "forces";
  rep.seed = ps.seed;
  rep.samples = ps.samples;
  rep.provenance = describe(ps, *grid);
  InequalityResult value = named("force-value"), deriv = named("force-derivative");
  double imag = 0.0;
  const NuclearState none;
  const double per = ps.radius / std::sqrt(static_cast<double>(ps.orbitals));
  for (std::size_t s = 0; s < ps.samples; ++s) {
    OrbitalSet psi;
    for (std::size_t j = 0; j < ps.orbitals; ++j) psi.push_back(random_h2_field(grid, rng, per, ps.cutoff_fraction));
    const auto fb = force_bound_check(psi, none);
    value.lhs.push_back(fb.ratio_value);
    value.rhs.push_back(1.0);
    value.ratios.push_back(fb.ratio_value);
    deriv.lhs.push_back(fb.ratio_derivative);
    deriv.rhs.push_back(1.0);
    deriv.ratios.push_back(fb.ratio_derivative);
    imag = std::max(imag, fb.diagonal_imag_residue);
  }
  finish(value, ps);
  finish(deriv, ps);
  rep.inequalities.push_back(std::move(value));
  rep.inequalities.push_back(std::move(deriv));
  rep.diagnostics["diagonal_imag_residue"] = imag;
  return rep;
}

PropagatorNormReport propagator_norm_probe(const TrajectoryRecord& nuc_traj, const NuclearState& nuc0,
                                           const GridPtr& grid, double epsilon, const SolverSettings& s,
                                           const std::vector<double>& thetas, std::size_t n_fields,
                                           std::uint64_t seed, double a_floor) {
  if (thetas.size() < 2) throw InvalidInput("propagator probe: need at least two window lengths");
  if (n_fields == 0) throw InvalidInput("propagator probe: need at least one field");
  if (!(a_floor > 0.0)) throw InvalidInput("propagator probe: A floor must be positive");
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (!(thetas[i] > 0.0) || thetas[i] > s.window_tau * (1.0 + 1e-12)) {
      throw InvalidInput("propagator probe: window lengths must lie in (0, window_tau]");
    }
    if (i > 0 && !(thetas[i] > thetas[i - 1])) throw InvalidInput("propagator probe: window lengths must increase");
  }
  Rng rng(seed);
  OrbitalSet fields;
  for (std::size_t f = 0; f < n_fields; ++f) fields.push_back(random_h2_field(grid, rng, 1.0));

  // Linear part only: no mean field.
  Physics linear;
  linear.hartree = false;
  linear.exchange.lambda = 0.0;
  linear.exchange.epsilon = epsilon;
  const TrajectoryRecord rec = solve_electron(nuc_traj, fields, nuc0, linear, s);

  PropagatorNormReport rep;
  rep.thetas = thetas;
  rep.amplification.assign(thetas.size(), 1.0);
  for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
    const double t = rec.times[rec.snapshot_index[k]] - rec.times.front();
    double amp = 0.0;
    for (std::size_t f = 0; f < n_fields; ++f) {
      amp = std::max(amp, h2_norm(rec.snapshots[k][f]) / h2_norm(fields[f]));
      const double l2_0 = spectral::l2_norm(fields[f]);
      rep.max_l2_defect =
          std::max(rep.max_l2_defect, std::abs(spectral::l2_norm(rec.snapshots[k][f]) - l2_0) / l2_0);
    }
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      if (t <= thetas[i] * (1.0 + 1e-12)) rep.amplification[i] = std::max(rep.amplification[i], amp);
    }
  }

  // Least squares log amp = a + b Theta.
  const double n = static_cast<double>(thetas.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double y = std::log(rep.amplification[i]);
    sx += thetas[i];
    sy += y;
    sxx += thetas[i] * thetas[i];
    sxy += thetas[i] * y;
  }
  rep.fit_b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.fit_a = (sy - rep.fit_b * sx) / n;
  rep.A = std::exp(rep.fit_a);
  rep.C = rep.fit_a > 0.0 ? rep.fit_b / rep.fit_a : 0.0;
  if (rep.A < 1.0 + a_floor || !(rep.C > 2.0)) {
    rep.clamped = true;
    rep.A = std::max(rep.A, 1.0 + a_floor);
    const double log_a = std::log(rep.A);
    double c = std::max(rep.C, 2.0);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      c = std::max(c, (std::log(rep.amplification[i]) / log_a - 1.0) / thetas[i]);
    }
    rep.C = std::nextafter(c, std::numeric_limits<double>::infinity());
    if (rep.C <= 2.0) rep.C = 2.0 + 1e-12;
  }
  std::ostringstream os;
  os << "fit log amp = " << rep.fit_a << " + " << rep.fit_b << " Theta over " << thetas.size() << " windows, "
     << n_fields << " fields, seed " << seed;
  if (rep.clamped) os << "; clamped to A=" << rep.A << ", C=" << rep.C;
  rep.provenance = os.str();
  return rep;
}

}  // namespace ksnd
