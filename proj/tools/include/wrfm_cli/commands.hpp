#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wrfm/solver.hpp"

namespace wrfm::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kConfigError = 2, kSolverError = 3 };

/// Command-line overrides shared by run and sweep.
struct CommandOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<Pipeline> pipeline;
  /// run only: binary dump of the assembled system.
  std::optional<std::string> dump;
  bool quiet = false;
};

/// Solves the configured problem and writes the JSON record to the output
/// path, or to `out` when none is set. The one-line summary goes to `out`
/// when the record went to a file and to `err` otherwise.
int cmd_run(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Runs the configured sweep and writes the CSV to the output path (with a
/// "<output>.manifest.json" sidecar) or to `out`.
int cmd_sweep(const CommandOptions& options, std::ostream& out, std::ostream& err);

struct ValidateOptions {
  std::vector<std::string> suites;
  /// Fault injection: scales every quadrature weight in the suites.
  double quadrature_weight_scale = 1.0;
  bool quiet = false;
};

/// One line per suite; exit 0 iff every suite passes.
int cmd_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err);

inline constexpr const char* kCsvHeader =
    "S,J,M,repeats,l2_mean,l2_std,linf_mean,linf_std,time_mean_s";

}  // namespace wrfm::cli
