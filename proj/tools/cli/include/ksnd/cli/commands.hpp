#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "ksnd/cli/config.hpp"

namespace ksnd::cli {

struct CommandContext {
  RunConfig config;
  /// Overrides config.output_dir when non-empty.
  std::string output_dir;
  std::ostream* out = nullptr;

  std::string dir() const { return output_dir.empty() ? config.output_dir : output_dir; }
};

const std::vector<std::string>& probe_names();
const std::vector<std::string>& oracle_names();

/// Gaussian packets (optionally orthonormalised) or the orbitals of a
/// checkpoint file, which must match the configured grid and count.
OrbitalSet initial_orbitals(const RunConfig& c, const GridPtr& grid);

/// Each returns a process exit code (see ExitCode) and writes its artifacts
/// under ctx.dir().
int cmd_simulate(const CommandContext& ctx);
int cmd_probe(const CommandContext& ctx, const std::string& name);
int cmd_check_admissibility(const CommandContext& ctx);
int cmd_oracle_compare(const CommandContext& ctx, const std::string& name);

}  // namespace ksnd::cli
