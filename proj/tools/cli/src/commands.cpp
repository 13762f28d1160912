#include "ksnd/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ksnd/admissibility.hpp"
#include "ksnd/cli/checkpoint.hpp"
#include "ksnd/cli/errors.hpp"
#include "ksnd/cli/output.hpp"
#include "ksnd/error.hpp"
#include "ksnd/norms.hpp"
#include "ksnd/oracles.hpp"
#include "ksnd/probes.hpp"
#include "ksnd/states.hpp"
#include "ksnd/uniqueness.hpp"

namespace ksnd::cli {

using nlohmann::json;

namespace {

std::ostream& out_of(const CommandContext& ctx) { return ctx.out ? *ctx.out : std::cout; }

std::string prepare_dir(const CommandContext& ctx) {
  const std::string d = ctx.dir();
  std::error_code ec;
  std::filesystem::create_directories(d, ec);
  if (ec) throw IoError("cannot create output directory " + d + ": " + ec.message());
  return d;
}

void emit(const json& j, const std::string& path) {
  require_finite_json(j);
  write_json(j, path);
}

int verdict(bool pass) { return pass ? exit_ok : exit_violation; }

/// Linear propagator along the ballistic continuation of the initial nuclei,
/// stepped at probe.dt over the longest probe window.
PropagatorNormReport run_propagator_probe(const RunConfig& c, const GridPtr& grid) {
  SolverSettings s = c.solver();
  s.dt = c.probe.dt;
  s.window_tau = *std::max_element(c.probe.thetas.begin(), c.probe.thetas.end());
  s.snapshot_stride = 1;
  std::vector<double> times(s.steps_per_window() + 1);
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i) * s.dt;
  return propagator_norm_probe(ballistic_trajectory(c.nuclei, times), c.nuclei, grid, c.exchange.epsilon, s,
                               c.probe.thetas, c.probe.fields, c.seed);
}

}  // namespace

const std::vector<std::string>& probe_names() {
  static const std::vector<std::string> names = {"hartree",      "exchange",          "nonlinearity",
                                                 "exchange-threshold", "mve",        "mve-gradient",
                                                 "forces",       "propagator-norm",   "uniqueness"};
  return names;
}

const std::vector<std::string>& oracle_names() {
  static const std::vector<std::string> names = {"hartree-erf", "free-gaussian", "force-energy", "two-proton"};
  return names;
}

OrbitalSet initial_orbitals(const RunConfig& c, const GridPtr& grid) {
  OrbitalSet psi;
  if (c.initial == InitialKind::file) {
    Checkpoint cp = read_checkpoint(c.initial_file);
    if (cp.orbitals.size() != c.electron_count) {
      throw ConfigError({{0, "checkpoint holds " + std::to_string(cp.orbitals.size()) +
                                 " orbitals but electrons.count = " + std::to_string(c.electron_count)}});
    }
    if (!(cp.orbitals.front().grid() == *grid)) {
      throw ConfigError({{0, "checkpoint grid does not match grid.n / grid.box_length"}});
    }
    // Rebind to the caller's grid object.
    for (auto& f : cp.orbitals) {
      ComplexField g(grid);
      std::copy(f.values().begin(), f.values().end(), g.values().begin());
      psi.push_back(std::move(g));
    }
  } else {
    for (const auto& o : c.orbitals) psi.push_back(gaussian_packet(grid, o.center, o.width, o.momentum));
  }
  if (c.orthonormalize) orthonormalize(psi);
  return psi;
}

int cmd_simulate(const CommandContext& ctx) {
  const RunConfig& c = ctx.config;
  auto& out = out_of(ctx);
  const std::string dir = prepare_dir(ctx);
  const GridPtr grid = c.make_grid();
  const OrbitalSet psi0 = initial_orbitals(c, grid);
  const Physics physics = c.physics();
  const SolverSettings s = c.solver();
  const std::size_t steps = s.steps_per_window();

  std::ofstream csv(dir + "/timeseries.csv", std::ios::trunc);
  if (!csv) throw IoError("cannot write " + dir + "/timeseries.csv");
  TimeSeriesWriter writer(csv, psi0.size(), c.nuclei.size());
  std::vector<double> energies;
  std::vector<double> rho_l1;
  std::vector<std::vector<double>> l2(psi0.size());
  std::size_t checkpoints = 0;
  const auto observer = [&](double t, const OrbitalSet& psi, const NuclearState& nuc) {
    const auto v = writer.row(t, psi, nuc, physics);
    energies.push_back(v[1]);
    rho_l1.push_back(v[6]);
    for (std::size_t j = 0; j < psi.size(); ++j) l2[j].push_back(v[7 + j]);
    const auto step = static_cast<std::size_t>(std::llround(t / s.dt));
    if (c.checkpoints && step % steps == 0) {
      write_checkpoint({t, nuc, psi}, dir + "/checkpoint_" + std::to_string(step / steps) + ".ksnd");
      ++checkpoints;
    }
  };

  json summary{{"command", "simulate"}, {"grid_n", c.grid_n}, {"box_length", c.box_length}, {"seed", c.seed},
               {"q_below_threshold", c.exchange.below_threshold()}};
  int code = exit_ok;
  SimulationResult result;
  try {
    result = run_simulation(psi0, c.nuclei, physics, s, c.total, c.stride, observer, false);
  } catch (const SimulationError& e) {
    code = e.report().status == SolveStatus::feasibility ? exit_violation : exit_nonconvergence;
    summary["status"] = "failed";
    summary["failed_window"] = e.window();
    summary["failure"] = to_json(e.report());
    out << "simulate: window " << e.window() << " failed: " << to_string(e.report().status) << " "
        << e.report().message << "\n";
  } catch (const NonFiniteError& e) {
    code = exit_nonconvergence;
    summary["status"] = "failed";
    summary["failure"] = {{"status", "non_finite"}, {"message", e.what()}};
    out << "simulate: " << e.what() << "\n";
  }
  csv.close();
  if (!csv) throw IoError("failed writing " + dir + "/timeseries.csv");

  summary["samples"] = energies.size();
  summary["energy_drift"] = relative_drift(energies);
  summary["rho_l1_drift"] = relative_drift(rho_l1);
  json l2d = json::array();
  for (const auto& series : l2) l2d.push_back(relative_drift(series));
  summary["orbital_l2_drift"] = l2d;
  summary["checkpoints"] = checkpoints;
  if (code == exit_ok) {
    summary["status"] = "ok";
    int max_alt = 0;
    double max_res = 0.0;
    bool in_el = true;
    bool in_nuc = true;
    for (const auto& w : result.windows) {
      max_alt = std::max(max_alt, w.alternations);
      if (!w.residuals.empty()) max_res = std::max(max_res, w.residuals.back());
      in_el = in_el && w.in_b_el;
      in_nuc = in_nuc && w.in_b_nuc;
    }
    summary["windows"] = result.windows.size();
    summary["picard"] = {{"max_alternations", max_alt}, {"max_final_residual", max_res}};
    summary["feasibility"] = {{"in_b_el", in_el}, {"in_b_nuc", in_nuc}};
    write_checkpoint({c.total, result.final_nuclei, result.final_orbitals}, dir + "/final.ksnd");
    out << "simulate: " << energies.size() << " samples, energy drift " << format_real(relative_drift(energies))
        << ", rho L1 drift " << format_real(relative_drift(rho_l1)) << "\n";
  }
  emit(summary, dir + "/summary.json");
  return code;
}

int cmd_probe(const CommandContext& ctx, const std::string& name) {
  if (std::find(probe_names().begin(), probe_names().end(), name) == probe_names().end()) {
    std::string msg = "unknown probe '" + name + "'; valid probes:";
    for (const auto& n : probe_names()) msg += " " + n;
    throw ConfigError({{0, msg}});
  }
  const RunConfig& c = ctx.config;
  auto& out = out_of(ctx);
  const std::string dir = prepare_dir(ctx);
  const GridPtr grid = c.make_grid();
  const ProbeSettings ps = c.probe_settings();
  json j;
  bool pass = true;

  const auto report = [&](ProbeReport r, const std::vector<std::string>& keep) {
    if (!keep.empty()) {
      std::erase_if(r.inequalities, [&](const auto& i) {
        return std::find(keep.begin(), keep.end(), i.name) == keep.end();
      });
    }
    for (const auto& i : r.inequalities) {
      out << "  " << i.name << ": calibrated " << format_real(i.split.calibrated) << ", max asserted "
          << format_real(i.split.max_asserted) << ", violations " << i.split.violations
          << (i.split.pass() ? "  PASS" : "  FAIL") << "\n";
    }
    pass = r.pass();
    j = to_json(r);
  };

  if (name == "hartree") {
    report(lipschitz_probe_hartree(grid, ps), {});
  } else if (name == "exchange" || name == "nonlinearity") {
    auto r = lipschitz_probe_exchange(grid, c.exchange, ps, c.probe.lp);
    report(std::move(r), name == "nonlinearity" ? std::vector<std::string>{"F", "G"} : std::vector<std::string>{});
  } else if (name == "exchange-threshold") {
    const ThresholdSweep sw = exchange_threshold_sweep(grid, c.exchange.q, c.probe.min_density, c.seed,
                                                       c.probe.perturbation);
    j = to_json(sw);
    const char* trend = sw.growth >= 10.0 ? "unbounded" : (sw.spread < 2.0 ? "bounded" : "inconclusive");
    j["trend"] = trend;
    j["below_threshold"] = c.exchange.below_threshold();
    out << "  q = " << format_real(sw.q) << ": ratio growth " << format_real(sw.growth) << ", spread "
        << format_real(sw.spread) << ", trend " << trend << "\n";
  } else if (name == "mve" || name == "mve-gradient") {
    const bool grad = name == "mve-gradient";
    const auto r = mve_probe(grid, grad ? std::vector<double>{} : c.probe.alpha,
                             grad ? c.probe.beta : std::vector<double>{}, ps);
    report(r, {});
    for (const auto& i : r.inequalities) {
      if (i.name == "mve alpha=0.5") {
        j["sharp_constant"] = i.max_ratio;
        out << "  alpha = 1/2 sharp constant " << format_real(i.max_ratio) << "\n";
      }
    }
  } else if (name == "forces") {
    report(force_probe(grid, ps), {});
  } else if (name == "propagator-norm") {
    const auto r = run_propagator_probe(c, grid);
    j = to_json(r);
    pass = r.max_l2_defect <= 1e-10;
    out << "  A = " << format_real(r.A) << ", C = " << format_real(r.C) << (r.clamped ? " (clamped)" : "")
        << ", L2 defect " << format_real(r.max_l2_defect) << (pass ? "  PASS" : "  FAIL") << "\n";
  } else if (name == "uniqueness") {
    const OrbitalSet psi0 = initial_orbitals(c, grid);
    const SolverSettings s = c.solver();
    const std::size_t stride = s.steps_per_window();
    const auto a = run_simulation(psi0, c.nuclei, c.physics(), s, c.total, stride);
    const auto b = run_simulation(psi0, c.nuclei, c.physics(), s, c.total, stride);
    const bool same = bit_identical(a.record, b.record);
    const auto self = uniqueness_probe(a.record, b.record, c.probe.p);
    const auto sweep = perturbation_sweep(psi0, c.nuclei, c.physics(), s, c.total, c.probe.sizes, c.seed, c.probe.p);
    bool linear = true;
    for (std::size_t i = 0; i < sweep.gap_ratios.size(); ++i) {
      const double expect = sweep.sizes[i + 1] / sweep.sizes[i];
      linear = linear && sweep.gap_ratios[i] >= expect / 2.0 && sweep.gap_ratios[i] <= expect * 2.0;
    }
    bool bounded = true;
    for (const auto& r : sweep.reports) bounded = bounded && r.fitted && std::isfinite(r.rate);
    pass = same && self.identical() && linear && bounded;
    j = {{"bit_identical", same}, {"identical_h", to_json(self)}, {"sizes", sweep.sizes},
         {"gap_ratios", sweep.gap_ratios}, {"h_ratios", sweep.h_ratios}, {"linear", linear},
         {"bounded_rate", bounded}, {"runs", json::array()}};
    for (const auto& r : sweep.reports) j["runs"].push_back(to_json(r));
    out << "  bit-identical " << (same ? "yes" : "no") << ", gap scaling " << (linear ? "linear" : "NOT linear")
        << ", fitted rates " << (bounded ? "bounded" : "unavailable") << "\n";
  }
  j["pass"] = pass;
  emit(j, dir + "/probe_" + name + ".json");
  out << "probe " << name << ": " << (pass ? "PASS" : "FAIL") << "\n";
  return verdict(pass);
}

int cmd_check_admissibility(const CommandContext& ctx) {
  const RunConfig& c = ctx.config;
  auto& out = out_of(ctx);
  const std::string dir = prepare_dir(ctx);
  const GridPtr grid = c.make_grid();
  const OrbitalSet psi0 = initial_orbitals(c, grid);
  const ProbeSettings ps = c.probe_settings();
  const auto& ac = c.admissibility;

  AdmissibilityConstants k;
  const auto configured = [&](const char* name, const std::optional<double>& v, std::optional<double>& dest) {
    if (v) {
      dest = v;
      k.provenance[name] = "configured";
    }
  };
  configured("A", ac.A, k.A);
  configured("C", ac.C, k.C);
  configured("C1", ac.C1, k.C1);
  configured("C2", ac.C2, k.C2);
  configured("lipschitz_scale", ac.lipschitz_scale, k.lipschitz_scale);

  if (!k.A || !k.C || !k.C1 || !k.lipschitz_scale || !k.C2) {
    out << "check-admissibility: probing missing constants\n";
    const auto prop = run_propagator_probe(c, grid);
    const auto forces = force_probe(grid, ps);
    const auto exch = lipschitz_probe_exchange(grid, c.exchange, ps, c.probe.lp);
    AdmissibilityConstants probed = constants_from_probes(c.nuclei, forces, exch, prop, c.probe.margin);
    const auto fill = [&](const char* name, std::optional<double>& dest, const std::optional<double>& v) {
      if (!dest) {
        dest = v;
        k.provenance[name] = probed.provenance[name];
      }
    };
    fill("A", k.A, probed.A);
    fill("C", k.C, probed.C);
    fill("C1", k.C1, probed.C1);
    fill("C2", k.C2, probed.C2);
    fill("lipschitz_scale", k.lipschitz_scale, probed.lipschitz_scale);
  }

  AdmissibilityOptions opt;
  opt.tau_max = ac.tau_max;
  opt.delta_override = ac.delta;
  const AdmissibilityReport r = admissibility_check(psi0, c.nuclei, c.exchange, c.window_tau, k, opt);
  json j = to_json(r);
  j["constants"] = {{"A", *k.A}, {"C", *k.C}, {"C1", *k.C1}, {"C2", *k.C2}, {"lipschitz_scale", *k.lipschitz_scale}};
  emit(j, dir + "/admissibility.json");
  out << "tau = " << format_real(r.tau) << ", B = " << format_real(r.B) << ", alpha = " << format_real(r.alpha)
      << ", delta = " << format_real(r.delta) << "\n";
  for (const auto& cond : r.conditions) {
    out << "  " << cond.name << ": " << format_real(cond.lhs) << " < " << format_real(cond.rhs) << "  "
        << (cond.holds ? "holds" : "FAILS") << "\n";
  }
  out << "tau* = " << format_real(r.tau_star) << "\n";
  out << "check-admissibility: " << (r.admissible ? "admissible" : "NOT admissible") << "\n";
  return verdict(r.admissible);
}

int cmd_oracle_compare(const CommandContext& ctx, const std::string& name) {
  if (std::find(oracle_names().begin(), oracle_names().end(), name) == oracle_names().end()) {
    std::string msg = "unknown oracle case '" + name + "'; valid cases:";
    for (const auto& n : oracle_names()) msg += " " + n;
    throw ConfigError({{0, msg}});
  }
  const RunConfig& c = ctx.config;
  auto& out = out_of(ctx);
  const std::string dir = prepare_dir(ctx);
  const GridPtr grid = c.make_grid();
  OracleResult r;
  if (name == "hartree-erf") {
    r = hartree_erf_oracle(grid, 1.0, 0.25 * c.box_length);
  } else if (name == "free-gaussian") {
    const double width = c.orbitals.empty() ? 1.0 : c.orbitals.front().width;
    r = free_gaussian_oracle(grid, width, c.window_tau, c.dt);
  } else if (name == "force-energy") {
    r = force_energy_oracle(grid, 5, c.seed, c.convention);
  } else {
    r = two_proton_oracle(c.box_length, 1.4, c.dt, c.window_tau);
  }
  emit(to_json(r), dir + "/oracle_" + name + ".json");
  out << "oracle " << name << ": error " << format_real(r.error) << " (tolerance " << format_real(r.tolerance)
      << ") " << (r.pass ? "PASS" : "FAIL") << "\n";
  return verdict(r.pass);
}

}  // namespace ksnd::cli
