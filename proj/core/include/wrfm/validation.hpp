#pragma once

#include <string>
#include <vector>

#include "wrfm/assembly.hpp"
#include "wrfm/benchmarks.hpp"

namespace wrfm {

struct SuiteResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // largest measured error
  double tolerance = 0.0;  // passes iff worst < tolerance
  std::string detail;
  double seconds = 0.0;
};

struct ValidationOptions {
  /// Suites to run; empty runs every suite.
  std::vector<std::string> suites;
  /// Fault injection: every quadrature rule built by the suites has its
  /// weights multiplied by this factor.
  double quadrature_weight_scale = 1.0;
  /// Budget checked by the closing "runtime" entry.
  double time_budget_s = 120.0;
};

/// Suite names in execution order ("runtime" is always appended).
std::vector<std::string> validation_suite_names();

/// Runs the selected suites. Throws InvalidArgument on an unknown name.
std::vector<SuiteResult> run_validation(const ValidationOptions& options = {});

/// Richardson-extrapolated central difference of f at x for a derivative of
/// total order <= 2 with step h.
double finite_difference(const std::function<double(const Vec&)>& f, const Vec& x,
                         const MultiIndex& deriv, double h);

/// Gradient of the static heat reference solution, piecewise by region.
Vec static_heat_gradient(const Vec& x);

/// Relative error of each weak row of `problem` (default hyperparameters)
/// applied to its reference, measured against the row's absolute scale.
struct WeakResidualSummary {
  double worst = 0.0;
  int failing_rows = 0;
  int rows = 0;
};

WeakResidualSummary reference_weak_residual(const ProblemSpec& problem,
                                            const VectorField& gradient, double tolerance,
                                            double weight_scale = 1.0);

}  // namespace wrfm
