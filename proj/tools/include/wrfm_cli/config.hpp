#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wrfm/benchmarks.hpp"
#include "wrfm/solver.hpp"

namespace wrfm::cli {

/// Malformed or invalid configuration. `what()` is "source:line: message"
/// when a line is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct SweepSpec {
  std::vector<int> s_values;
  std::vector<int> j_values;
  int repeats = 10;
};

/// Everything one invocation needs. Unset fields fall back to the problem
/// defaults when resolved.
struct RunConfig {
  std::string problem;
  ProblemParameters parameters;
  SolverConfig solver;
  MultiIndex metric_grid{0, 0, 0};
  std::optional<std::string> output;
  std::optional<SweepSpec> sweep;
  /// Line of the 'pou' key, for messages about the pipeline constraint.
  int pou_line = 0;
};

/// Parses YAML (JSON is accepted, being a YAML subset). `source` names the
/// text in error messages.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Throws ConfigError when the weak pipeline is paired with an overlapping
/// partition of unity. Rechecked after command-line overrides.
void check_pipeline(const RunConfig& config, const std::string& source);

/// Builtin problem with the config's overrides applied.
ProblemSpec make_problem(const RunConfig& config);

/// Config with every default materialized: solver fields resolved against
/// the problem, metric grid filled, geometry spelled out.
RunConfig resolve(const RunConfig& config, const ProblemSpec& problem);

/// Config document in the input schema. Feeding it back to parse_config
/// reproduces the run.
nlohmann::ordered_json to_json(const RunConfig& config, int dim);

}  // namespace wrfm::cli
