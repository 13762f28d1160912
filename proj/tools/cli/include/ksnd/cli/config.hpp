#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksnd/dynamics.hpp"
#include "ksnd/probes.hpp"

namespace ksnd::cli {

struct OrbitalSpec {
  Vec3 center{0.0, 0.0, 0.0};
  double width = 1.0;
  Vec3 momentum{0.0, 0.0, 0.0};
};

enum class InitialKind { gaussian_packets, file };

/// Settings for `probe` and `check-admissibility`.
struct ProbeConfig {
  std::size_t samples = 1000;
  std::size_t calibrate = 0;
  double margin = 2.0;
  std::size_t orbitals = 1;
  double radius = 1.0;
  double lp = 2.0;
  std::vector<double> alpha{0.5, 2.5};
  std::vector<double> beta{1.5, 2.5};
  std::vector<double> min_density{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double perturbation = 1e-5;
  std::size_t fields = 4;
  /// Time step of the propagator-norm probe, independent of time.dt.
  double dt = 0.01;
  std::vector<double> thetas{0.1, 0.2, 0.4};
  double p = 3.0;
  std::vector<double> sizes{1e-6, 1e-5, 1e-4};
};

struct AdmissibilityConfig {
  double tau_max = 1.0;
  std::optional<double> delta;
  std::optional<double> A;
  std::optional<double> C;
  std::optional<double> C1;
  std::optional<double> C2;
  std::optional<double> lipschitz_scale;
};

struct RunConfig {
  std::size_t grid_n = 0;
  double box_length = 0.0;

  std::size_t electron_count = 0;
  InitialKind initial = InitialKind::gaussian_packets;
  std::string initial_file;
  bool orthonormalize = true;
  std::vector<OrbitalSpec> orbitals;

  NuclearState nuclei;

  ExchangeParams exchange;  // epsilon resolved to 2 * spacing when omitted
  bool hartree = true;
  ForceConvention convention = ForceConvention::newton_consistent;

  double dt = 0.0;
  double window_tau = 0.1;
  double total = 0.0;
  double picard_tol = 1e-10;
  int max_iters = 50;
  double propagator_bound = 1.0;

  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::size_t stride = 1;
  bool checkpoints = false;

  ProbeConfig probe;
  AdmissibilityConfig admissibility;

  Physics physics() const;
  SolverSettings solver() const;
  ProbeSettings probe_settings() const;
  GridPtr make_grid() const;
};

struct ConfigIssue {
  std::size_t line = 0;  // 0 when the issue is not tied to a line
  std::string message;
};

/// Carries every violation found, not only the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Grammar: one `key = value` per line, `#` starts a comment. Dotted keys
/// (`grid.n`) and `seed` are global. `[nucleus]` and `[orbital]` open a block;
/// bare keys that follow belong to the latest block. Vectors are three
/// comma-separated reals, lists are comma-separated reals.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& c);

}  // namespace ksnd::cli
