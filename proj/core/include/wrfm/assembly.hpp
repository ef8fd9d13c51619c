#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wrfm/feature_basis.hpp"
#include "wrfm/geometry.hpp"
#include "wrfm/problem.hpp"
#include "wrfm/quadrature.hpp"
#include "wrfm/test_functions.hpp"

namespace wrfm {

enum class RowCategory : std::uint32_t { weak, strong, boundary, interface_value, interface_deriv };

std::string_view to_string(RowCategory c);

struct RowTag {
  RowCategory category = RowCategory::weak;
  int subdomain = -1;
  int other = -1;       // right-hand subdomain of interface rows
  MultiIndex index{};   // test-function frequencies of weak rows
  Vec point{};          // collocation point of pointwise rows
};

/// Dense least-squares system with one tag per row. Columns are laid out
/// block-wise: subdomain n occupies [column_offsets[n], column_offsets[n+1]).
struct AssembledSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  std::vector<RowTag> tags;
  std::vector<int> column_offsets;

  Eigen::Index rows() const { return matrix.rows(); }
  Eigen::Index cols() const { return matrix.cols(); }
  int column(int n, int j) const { return column_offsets[n] + j; }
  std::size_t count(RowCategory c) const;
};

/// How weak integrals treat exclusions inside a subdomain.
///  subtract: integrate the whole box, subtract accurate rules over each
///            exclusion and add the integration-by-parts terms on its boundary.
///  mask:     drop the box nodes outside the domain; no boundary terms.
enum class HoleQuadrature { subtract, mask };

HoleQuadrature parse_hole_quadrature(std::string_view name);
std::string_view to_string(HoleQuadrature h);

/// Weak-form system: Petrov-Galerkin rows integrated over the part of
/// subdomain n inside the domain, followed by Dirichlet collocation rows and
/// interface value-continuity rows. Requires psi_a.
AssembledSystem assemble_weak(const ProblemSpec& problem, const Decomposition& dec,
                              std::span<const SubdomainBasis> bases, const TestSet& tests,
                              std::span<const TensorRule> rules,
                              std::span<const int> boundary_partitions,
                              std::span<const int> interface_partitions,
                              HoleQuadrature hole_quadrature = HoleQuadrature::subtract);

using VectorField = std::function<Vec(const Vec&)>;

struct WeakResidual {
  Eigen::VectorXd residual;  // row value minus rhs
  /// Sum of the absolute values of every quadrature term in the row
  /// (volume, boundary and load). Round-off in the residual is relative to it.
  Eigen::VectorXd scale;
  std::vector<RowTag> tags;
};

/// Weak rows applied to a closed-form function instead of the random
/// features. `grad_u` is only used for the boundary terms of the subtract
/// mode.
WeakResidual weak_residual(const ProblemSpec& problem, const Decomposition& dec,
                           const TestSet& tests, std::span<const TensorRule> rules,
                           const ScalarField& u, const VectorField& grad_u,
                           HoleQuadrature hole_quadrature = HoleQuadrature::subtract);

/// Strong-form collocation system. `interior` holds the collocation points of
/// each subdomain. Interface value and normal-derivative rows are emitted for
/// psi_a only; smooth partitions of unity blend neighbouring blocks already.
AssembledSystem assemble_strong(const ProblemSpec& problem, const Decomposition& dec,
                                std::span<const SubdomainBasis> bases,
                                std::span<const std::vector<Vec>> interior,
                                std::span<const OwnedBoundaryPoint> boundary,
                                std::span<const InterfacePoint> interfaces);

enum class RescaleMode { none, max_abs };

RescaleMode parse_rescale(std::string_view name);
std::string_view to_string(RescaleMode m);

struct RescaleReport {
  std::vector<Eigen::Index> zero_rows;
};

/// max_abs divides each row and its rhs by the row's largest absolute entry.
/// All-zero rows are left alone and listed in the report.
AssembledSystem rescale_rows(AssembledSystem system, RescaleMode mode,
                             RescaleReport* report = nullptr);

struct CategoryWeights {
  double weak = 1.0;
  double boundary = 1.0;
  double interface = 1.0;
};

/// Multiplies rows by their category weight (strong rows use `weak`).
void apply_category_weights(AssembledSystem& system, const CategoryWeights& weights);

/// Binary dump: "WRFM", u32 rows, u32 cols, u32 reserved (= 0), then the
/// matrix row-major as little-endian float64, the rhs, and per row
/// (u32 category, i32 subdomain, i32 other).
void write_system(const AssembledSystem& system, std::ostream& out);
AssembledSystem read_system(std::istream& in);

/// Mode-wise contraction used by the weak assembly: `values` holds C columns
/// of a tensor-grid field (rows ordered q0 fastest, shape Q0 x Q1 x Q2) and
/// factors[i] is K_i x Q_i. Returns (K0*K1*K2) x C with k0 fastest.
Eigen::MatrixXd contract_tensor(const Eigen::MatrixXd& values,
                                const std::array<Eigen::MatrixXd, kMaxDim>& factors);

}  // namespace wrfm
