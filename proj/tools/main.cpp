#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "macrobell_cli/commands.hpp"
#include "macrobell_cli/config.hpp"

using namespace macrobell::cli;

int main(int argc, char** argv) {
  CLI::App app{"macrobell: phase-entangled coherent states over lossy links"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::string protocol, format, sweep, bins_path;
  std::optional<std::uint64_t> seed;

  app.add_option("-c,--config", config_path, "Configuration file ([source] [channel] [detector] [sweep] [run])");
  app.add_option("-s,--set", overrides, "Override one field: section.key=value (repeatable)");
  app.add_option("--protocol", protocol, "usd2 or usd4");
  app.add_option("--format", format, "table, csv or json");
  app.add_option("--seed", seed, "Monte Carlo seed");
  app.add_option("--sweep", sweep, "Sweep axis var=start:stop:steps (replaces [sweep])");

  auto* rates = app.add_subcommand("rates", "Success probabilities, counting rates, visibility and S");
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate rates along one sweep axis");
  auto* oracle = app.add_subcommand("oracle", "Cross-check analytic probabilities against the number-basis oracle");
  auto* plan = app.add_subcommand("plan", "Maximum separation, limiting factor and optimal phase");
  auto* mc = app.add_subcommand("montecarlo", "Simulate coincidence counts at both fringe extremes");
  mc->add_option("--bins-out", bins_path, "Also write binned counts as CSV to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) load_config_file(config, config_path);
    for (const auto& o : overrides) apply_override(config, o);
    if (!protocol.empty()) apply_setting(config, "run", "protocol", protocol);
    if (!format.empty()) apply_setting(config, "run", "format", format);
    if (seed) config.seed = *seed;
    if (!sweep.empty()) config.sweep = {parse_sweep(sweep)};
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  if (rates->parsed()) return cmd_rates(config, std::cout, std::cerr);
  if (sweep_cmd->parsed()) return cmd_sweep(config, std::cout, std::cerr);
  if (oracle->parsed()) return cmd_oracle(config, std::cout, std::cerr);
  if (plan->parsed()) return cmd_plan(config, std::cout, std::cerr);
  if (bins_path.empty()) return cmd_montecarlo(config, std::cout, std::cerr);
  std::ofstream bins(bins_path, std::ios::binary);
  if (!bins) {
    std::cerr << "error: cannot write '" << bins_path << "'\n";
    return kExitInvalid;
  }
  return cmd_montecarlo(config, std::cout, std::cerr, &bins);
}
