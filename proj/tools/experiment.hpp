#pragma once

#include <wsens/wsens.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wsens::cli {

/// Exit codes shared by every command.
enum ExitCode : int { kOk = 0, kUsage = 1, kConfigInvalid = 2, kFailure = 3 };

struct MarketSection {
  int d = 1;
  int n = 1;
  std::string mu = "const:[0]";
  std::string sigma = "const:[1]";
  std::string r = "const:[0]";
  double x0 = 1.0;
  double condition_cap = kDefaultConditionCap;
};

struct PerturbationSection {
  // Empty strings mean a zero direction.
  std::string dmu;
  std::string dsigma;
  std::string dr;
  /// d x d matrix A of the kernel-preserving construction used by h1check.
  std::string kernel_direction;
  double tau = 0.0;
  std::vector<double> tau_grid;
  std::vector<double> eps = kDefaultEpsSchedule;
};

struct McSection {
  std::size_t paths = 10000;
  int steps = 200;
  double horizon = 1.0;
  std::optional<std::uint64_t> seed;
};

struct NormsSection {
  std::vector<std::string> family;  // kernel directions nu, each n x 1
};

struct DanskinSection {
  std::string cloud;  // CSV file, one point per row
  std::vector<double> direction;
  std::vector<double> delta;
  double tie_tol = kDefaultTieTol;
};

struct OutputSection {
  std::string directory = ".";
  std::string formats = "csv";
};

/// One experiment, read from a sectioned `key = value` file.
struct ExperimentConfig {
  MarketSection market;
  PerturbationSection perturbation;
  McSection mc;
  std::string utility = "sqrt";
  NormsSection norms;
  DanskinSection danskin;
  OutputSection output;

  static ExperimentConfig parse(std::istream& is);
  static ExperimentConfig load(const std::string& path);
  std::string to_ini() const;

  /// Throws ConfigError when a coefficient spec does not fit (d, n) or a
  /// required field is missing.
  void validate() const;

  MarketModel market_model() const;
  Utility utility_spec() const;
  PerturbationSpec perturbation_spec() const;
  PathEnsemble ensemble() const;
  std::uint64_t seed() const;
};

inline const std::vector<std::string> kCommands{"value", "sens",     "example1", "example2",
                                                "h1check", "norms", "danskin", "secondorder"};

/// Runs one command, writing `<command>.csv` (and companions) into the output
/// directory and a summary to `out`. Errors are reported on `err` and mapped
/// to exit codes.
int run(const std::string& command, const ExperimentConfig& config, std::ostream& out, std::ostream& err);

}  // namespace wsens::cli
