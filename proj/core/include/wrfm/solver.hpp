#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wrfm/assembly.hpp"
#include "wrfm/feature_basis.hpp"
#include "wrfm/problem.hpp"

namespace wrfm {

struct SolveReport {
  Eigen::VectorXd coefficients;
  int effective_rank = 0;
  double residual_norm = 0.0;
  double sigma_max = 0.0;
  double sigma_min_retained = 0.0;
  double wall_time_s = 0.0;
};

/// Minimum-norm least-squares solution by SVD; singular values below
/// rcond * sigma_max are discarded.
SolveReport least_squares(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& rhs,
                          double rcond);

enum class Pipeline { weak, strong };

Pipeline parse_pipeline(std::string_view name);
std::string_view to_string(Pipeline p);

/// Every knob of one solve. Zero entries in per-axis fields and empty
/// optionals mean "use the problem default" (or "auto" for the quadrature
/// order).
struct SolverConfig {
  Pipeline pipeline = Pipeline::weak;
  MultiIndex subdomains{0, 0, 0};
  int features = 0;
  MultiIndex tests{0, 0, 0};
  MultiIndex boundary_partitions{0, 0, 0};
  MultiIndex interface_partitions{0, 0, 0};
  MultiIndex interior_partitions{0, 0, 0};
  MultiIndex quadrature_order{0, 0, 0};
  std::optional<double> feature_range;
  Activation activation = Activation::tanh;
  PartitionOfUnity pou{};
  WindowShape window{};
  std::optional<double> rcond;
  RescaleMode rescale = RescaleMode::max_abs;
  HoleQuadrature hole_quadrature = HoleQuadrature::subtract;
  CategoryWeights weights{};
  std::uint64_t seed = 1;

  /// Copy with every zero field replaced by the problem default.
  SolverConfig resolved(const ProblemSpec& problem) const;
  /// Throws InvalidArgument / UnsupportedConfiguration on bad values.
  void validate(int dim) const;
};

struct SolveResult {
  GlobalModel model;
  SolveReport report;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  double assembly_time_s = 0.0;
  std::vector<std::string> warnings;
};

/// geometry -> bases -> tests or collocation -> assembly -> rescale ->
/// least squares. `config` is resolved against the problem first.
SolveResult solve_problem(const ProblemSpec& problem, const SolverConfig& config);

/// Assembly stage of solve_problem, exposed for inspection and dumps.
AssembledSystem build_system(const ProblemSpec& problem, const SolverConfig& resolved,
                             const Decomposition& dec, std::span<const SubdomainBasis> bases);

std::vector<SubdomainBasis> sample_bases(const Decomposition& dec, const SolverConfig& resolved);

}  // namespace wrfm
