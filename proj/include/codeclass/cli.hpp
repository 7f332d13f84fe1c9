#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "codeclass/canon.hpp"
#include "codeclass/extsys.hpp"

namespace codeclass {

enum ExitCode : int {
  kExitOk = 0,
  kExitInfeasible = 20,
  kExitIncomplete = 30,
  kExitUsage = 64,
  kExitFormat = 65,
};

/// Parsed command line. Field order is the order of the canonical argument string.
struct CliConfig {
  std::string subcommand;
  int q = 0;
  /// Target dimension (classify).
  int dim = 0;
  /// Start dimension when no seeds are given.
  int k0 = 2;
  int n_max = 0;
  int n_min = 0;
  /// Explicit weight list, or empty.
  std::string weights;
  /// Divisibility blocks: delta and "a:b,a:b" multiplier ranges.
  int div = 0;
  std::string range;
  int max_mult = kUnbounded;
  /// "k:lambda" overrides for intermediate layers.
  std::map<int, int> layer_max_mult;
  std::string input;
  std::string output;
  std::string seeds;
  int record = -1;
  int r = 0;
  bool phase0 = true;
  bool gap_reform = false;
  double hyperplane_fraction = 1.0;
  bool lp = true;
  bool symmetry = true;
  int workers = 1;
  std::uint64_t max_nodes = 0;
  double max_seconds = 0.0;
  Equivalence equivalence = Equivalence::Semilinear;
  /// "parent:r=path" external verdicts (extend, classify for the last layer).
  std::vector<std::string> verdicts;
  int verbosity = 0;

  /// Arguments (without program name) that parse back to this config.
  std::vector<std::string> to_args() const;
  std::string canonical_string() const;
  bool operator==(const CliConfig&) const = default;
};

/// Throws Error(InvalidArgument) on unknown flags, bad values or invalid combinations.
CliConfig parse_cli(const std::vector<std::string>& args);

/// Weight spectrum named by the config, or throws Error(InvalidArgument).
WeightSpectrum spectrum_of(const CliConfig& c);

/// Runs one subcommand; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace codeclass
