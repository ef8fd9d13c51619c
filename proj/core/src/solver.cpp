#include "wrfm/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "wrfm/errors.hpp"
#include "wrfm/quadrature.hpp"
#include "wrfm/test_functions.hpp"

namespace wrfm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void fill_default(MultiIndex& field, const MultiIndex& fallback, int dim) {
  for (int i = 0; i < dim; ++i)
    if (field[i] == 0) field[i] = fallback[i];
  for (int i = dim; i < kMaxDim; ++i) field[i] = 1;
}

}  // namespace

SolveReport least_squares(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& rhs,
                          double rcond) {
  const auto t0 = Clock::now();
  if (matrix.rows() < 1 || matrix.cols() < 1) throw InvalidInput("least squares on empty matrix");
  if (rhs.size() != matrix.rows()) throw InvalidInput("rhs length does not match matrix rows");
  if (!matrix.allFinite() || !rhs.allFinite())
    throw InvalidInput("least squares input contains non-finite entries");
  if (!(rcond >= 0.0)) throw InvalidArgument("rcond must be non-negative");

  // Tall systems: Householder QR first, then SVD of the small triangular
  // factor. Same singular values and minimum-norm solution as a direct SVD.
  Eigen::MatrixXd u_mat;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v_mat;
  Eigen::VectorXd projected;
  if (matrix.rows() > matrix.cols()) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(matrix);
    const Eigen::Index n = matrix.cols();
    const Eigen::MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd qtb = qr.householderQ().transpose() * rhs;
    projected = svd.matrixU().transpose() * qtb.head(n);
    sigma = svd.singularValues();
    v_mat = svd.matrixV();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    projected = svd.matrixU().transpose() * rhs;
    sigma = svd.singularValues();
    v_mat = svd.matrixV();
  }

  SolveReport report;
  report.sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  const double cutoff = rcond * report.sigma_max;
  Eigen::VectorXd scaled = Eigen::VectorXd::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff && sigma(i) > 0.0) {
      scaled(i) = projected(i) / sigma(i);
      report.sigma_min_retained = sigma(i);
      ++report.effective_rank;
    }
  }
  report.coefficients = v_mat * scaled;
  report.residual_norm = (matrix * report.coefficients - rhs).norm();
  report.wall_time_s = seconds_since(t0);
  return report;
}

Pipeline parse_pipeline(std::string_view name) {
  if (name == "weak") return Pipeline::weak;
  if (name == "strong") return Pipeline::strong;
  throw InvalidArgument("unknown pipeline '" + std::string(name) + "'");
}

std::string_view to_string(Pipeline p) { return p == Pipeline::weak ? "weak" : "strong"; }

SolverConfig SolverConfig::resolved(const ProblemSpec& problem) const {
  SolverConfig c = *this;
  const int dim = problem.dim();
  const auto& d = problem.defaults;
  fill_default(c.subdomains, d.subdomains, dim);
  if (c.features == 0) c.features = d.features;
  fill_default(c.tests, d.tests, dim);
  fill_default(c.boundary_partitions, d.boundary_partitions, dim);
  fill_default(c.interface_partitions, c.boundary_partitions, dim);
  fill_default(c.interior_partitions, c.boundary_partitions, dim);
  MultiIndex auto_q{};
  if (!c.feature_range) c.feature_range = d.feature_range;
  if (!c.rcond) c.rcond = d.rcond;
  const int window_q = c.window.alpha > 0.0 ? window_quadrature_order(c.window) : 0;
  for (int i = 0; i < dim; ++i)
    auto_q[i] = std::max(default_quadrature_order(c.tests[i]), window_q);
  fill_default(c.quadrature_order, auto_q, dim);
  return c;
}

void SolverConfig::validate(int dim) const {
  const auto positive = [&](const MultiIndex& m, const char* what) {
    for (int i = 0; i < dim; ++i)
      if (m[i] < 1) throw InvalidArgument(std::string(what) + " must be positive on every axis");
  };
  positive(subdomains, "subdomains");
  positive(tests, "test_functions");
  positive(boundary_partitions, "boundary_partitions");
  positive(interface_partitions, "interface_partitions");
  positive(interior_partitions, "interior_partitions");
  positive(quadrature_order, "quadrature_order");
  for (int i = 0; i < dim; ++i)
    if (quadrature_order[i] > kMaxGaussOrder)
      throw InvalidArgument("quadrature_order must be <= 256");
  if (features < 1) throw InvalidArgument("features_per_subdomain must be positive");
  if (!feature_range || !rcond) throw InternalError("solver configuration used before resolve");
  if (!(*feature_range > 0.0)) throw InvalidArgument("feature_range must be positive");
  if (!(pou.alpha > 0.0)) throw InvalidArgument("pou_alpha must be positive");
  if (!(window.alpha > 0.0)) throw InvalidArgument("window_alpha must be positive");
  if (!(*rcond >= 0.0)) throw InvalidArgument("rcond must be non-negative");
  if (pipeline == Pipeline::weak && pou.kind != PouKind::psi_a)
    throw UnsupportedConfiguration("the weak pipeline requires pou = psi_a");
}

std::vector<SubdomainBasis> sample_bases(const Decomposition& dec, const SolverConfig& c) {
  std::vector<SubdomainBasis> bases;
  bases.reserve(dec.subdomains.size());
  for (const auto& sub : dec.subdomains)
    bases.push_back(sample_basis(sub, c.features, *c.feature_range, c.seed, c.activation, c.pou));
  return bases;
}

AssembledSystem build_system(const ProblemSpec& problem, const SolverConfig& c,
                             const Decomposition& dec, std::span<const SubdomainBasis> bases) {
  const int dim = problem.dim();
  const std::span<const int> bparts(c.boundary_partitions.data(), dim);
  const std::span<const int> iparts(c.interface_partitions.data(), dim);
  if (c.pipeline == Pipeline::weak) {
    const MultiIndex counts = c.tests;
    const TestSet tests = build_test_set(dec, std::span<const MultiIndex>(&counts, 1), c.window);
    const bool masked =
        c.hole_quadrature == HoleQuadrature::mask && !problem.domain.exclusions().empty();
    const Domain* mask = masked ? &problem.domain : nullptr;
    std::vector<TensorRule> rules;
    rules.reserve(dec.subdomains.size());
    for (const auto& sub : dec.subdomains) rules.emplace_back(sub.box, c.quadrature_order, mask);
    return assemble_weak(problem, dec, bases, tests, rules, bparts, iparts, c.hole_quadrature);
  }
  std::vector<std::vector<Vec>> interior;
  for (const auto& sub : dec.subdomains)
    interior.push_back(interior_points(problem.domain, sub.box,
                                       std::span<const int>(c.interior_partitions.data(), dim)));
  const auto boundary = subdomain_boundary_points(problem.domain, dec, bparts);
  const auto iface = interface_points(dec, iparts);
  return assemble_strong(problem, dec, bases, interior, boundary, iface);
}

SolveResult solve_problem(const ProblemSpec& problem, const SolverConfig& config) {
  const auto t0 = Clock::now();
  const SolverConfig c = config.resolved(problem);
  const int dim = problem.dim();
  c.validate(dim);

  Decomposition dec = decompose(problem.domain.bounding(),
                                std::span<const int>(c.subdomains.data(), dim));
  std::vector<SubdomainBasis> bases = sample_bases(dec, c);

  AssembledSystem system = build_system(problem, c, dec, bases);
  RescaleReport rescale_report;
  system = rescale_rows(std::move(system), c.rescale, &rescale_report);
  apply_category_weights(system, c.weights);
  const double assembly_time = seconds_since(t0);

  SolveReport report = least_squares(system.matrix, system.rhs, *c.rcond);
  GlobalModel model(std::move(dec), std::move(bases));
  model.set_coefficients(report.coefficients);
  report.wall_time_s = seconds_since(t0);

  SolveResult result{std::move(model), std::move(report), system.rows(), system.cols(),
                     assembly_time, {}};
  if (!rescale_report.zero_rows.empty())
    result.warnings.push_back(std::to_string(rescale_report.zero_rows.size()) +
                              " all-zero rows in the assembled system");
  return result;
}

}  // namespace wrfm
