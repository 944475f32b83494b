// parity_sim: run or validate a scenario file.
//
//   parity_sim run <scenario.toml> --out DIR [--seed U64] [--threads N]
//   parity_sim validate <scenario.toml>
//
// Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
// 1 any other failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "paritysim/error.hpp"
#include "paritysim/mle.hpp"
#include "paritysim/scenario.hpp"

namespace ps = paritysim;

namespace {

int threads_from_env() {
  const char* env = std::getenv("PARITY_SIM_THREADS");
  if (!env || !*env) return 0;
  try {
    std::size_t used = 0;
    const int n = std::stoi(env, &used);
    if (used == std::string(env).size() && n > 0) return n;
  } catch (const std::exception&) {
  }
  throw ps::Error(ps::ErrorKind::ConfigError, "PARITY_SIM_THREADS must be a positive integer");
}

int exit_code(const ps::Error& e) {
  switch (e.kind()) {
    case ps::ErrorKind::ConfigError: return 2;
    case ps::ErrorKind::NotConverged: return 3;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parity-detection simulation scenarios"};
  app.require_subcommand(1);

  std::string run_config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  CLI::App* run = app.add_subcommand("run", "Run a scenario and write its outputs");
  run->add_option("config", run_config, "Scenario TOML file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--threads", threads, "Worker thread cap (default: PARITY_SIM_THREADS)")
      ->check(CLI::PositiveNumber);

  std::string validate_config;
  CLI::App* validate = app.add_subcommand("validate", "Check a scenario file without running it");
  validate->add_option("config", validate_config, "Scenario TOML file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) {
      const ps::ScenarioConfig config = ps::parse_scenario(validate_config);
      std::cout << "OK: scenario '" << config.scenario << "'\n";
      for (const auto& w : config.warnings) std::cout << "warning: " << w << '\n';
      std::cout << "defaulted fields (" << config.defaulted.size() << "):\n";
      for (const auto& d : config.defaulted) std::cout << "  " << d << '\n';
      return 0;
    }

    ps::ScenarioConfig config = ps::parse_scenario(run_config);
    if (seed) config.seed = *seed;
    if (threads == 0) threads = threads_from_env();
    for (const auto& w : config.warnings) std::cerr << "warning: " << w << '\n';
    const ps::Json summary = ps::run_scenario(config, out_dir, threads);
    std::cout << summary.dump(2) << '\n';
    return 0;
  } catch (const ps::NotConverged& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ps::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
