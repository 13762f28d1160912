#include <iostream>

#include "CLI11.hpp"
#include "ksnd/cli/commands.hpp"
#include "ksnd/cli/errors.hpp"
#include "ksnd/error.hpp"
#include "ksnd/parallel.hpp"

using namespace ksnd::cli;

int main(int argc, char** argv) {
  CLI::App app{"ksnd: spectral Kohn-Sham plus Newtonian nuclei simulator and estimate probes"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--output", output_dir, "output directory (overrides output.dir)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides seed)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  std::string probe_name;
  std::string oracle_name;
  auto* simulate = app.add_subcommand("simulate", "run the coupled dynamics and write a CSV time series");
  auto* probe = app.add_subcommand("probe", "run one estimate probe");
  probe->add_option("name", probe_name, "probe name")->required();
  auto* admissibility = app.add_subcommand("check-admissibility", "evaluate the window-length conditions");
  auto* oracle = app.add_subcommand("oracle-compare", "compare against an analytic or refined reference");
  oracle->add_option("case", oracle_name, "oracle case")->required();
  app.footer("probes: hartree exchange nonlinearity exchange-threshold mve mve-gradient forces propagator-norm "
             "uniqueness\noracle cases: hartree-erf free-gaussian force-energy two-proton");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    ksnd::set_thread_count(static_cast<int>(threads));
    CommandContext ctx;
    ctx.config = load_config(config_path);
    if (*seed_opt) ctx.config.seed = seed;
    if (ctx.config.exchange.lambda != 0.0 && ctx.config.exchange.below_threshold()) {
      std::cerr << "warning: exchange.q = " << ctx.config.exchange.q << " is below 7/2; existence is not guaranteed\n";
    }
    ctx.output_dir = output_dir;
    ctx.out = &std::cout;
    if (*simulate) return cmd_simulate(ctx);
    if (*probe) return cmd_probe(ctx, probe_name);
    if (*admissibility) return cmd_check_admissibility(ctx);
    if (*oracle) return cmd_oracle_compare(ctx, oracle_name);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return exit_config;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return exit_io;
  } catch (const ksnd::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return exit_config;
  } catch (const ksnd::NonFiniteError& e) {
    std::cerr << "non-finite state: " << e.what() << "\n";
    return exit_nonconvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_config;
}
