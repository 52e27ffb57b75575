#include "experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace wsens::cli;
  CLI::App app{"Weak and strong utility sensitivities under Monte Carlo"};
  std::string command, config_path, out_dir;
  std::optional<double> horizon;
  std::optional<std::size_t> paths;
  std::optional<int> steps;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "value | sens | example1 | example2 | h1check | norms | danskin | secondorder")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("-c,--config", config_path, "experiment file (sectioned key = value)")->check(CLI::ExistingFile);
  app.add_option("--T", horizon, "horizon override");
  app.add_option("--paths", paths, "number of paths override");
  app.add_option("--steps", steps, "time steps override");
  app.add_option("--seed", seed, "seed override");
  app.add_option("--out", out_dir, "output directory override");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  ExperimentConfig config;
  try {
    if (!config_path.empty()) config = ExperimentConfig::load(config_path);
  } catch (const wsens::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigInvalid;
  }
  if (horizon) config.mc.horizon = *horizon;
  if (paths) config.mc.paths = *paths;
  if (steps) config.mc.steps = *steps;
  if (seed) config.mc.seed = *seed;
  if (!out_dir.empty()) config.output.directory = out_dir;
  return run(command, config, std::cout, std::cerr);
}
