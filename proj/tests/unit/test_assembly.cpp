#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "wrfm/assembly.hpp"
#include "wrfm/benchmarks.hpp"
#include "wrfm/errors.hpp"
#include "wrfm/solver.hpp"

namespace wrfm {
namespace {

using test::box;
using Eigen::Index;
constexpr double kPi = std::numbers::pi;

struct Built {
  SolverConfig config;
  Decomposition dec;
  std::vector<SubdomainBasis> bases;
  AssembledSystem system;
};

Built build(const ProblemSpec& problem, SolverConfig config) {
  config = config.resolved(problem);
  config.validate(problem.dim());
  Decomposition dec =
      decompose(problem.domain.bounding(), std::span<const int>(config.subdomains.data(),
                                                                problem.dim()));
  auto bases = sample_bases(dec, config);
  AssembledSystem system = build_system(problem, config, dec, bases);
  return {config, std::move(dec), std::move(bases), std::move(system)};
}

ProblemSpec laplace_zero(const AxisBox& b) {
  return ProblemSpec{"zero",
                     Domain(b),
                     LinearOperator::laplacian(b.dim),
                     [](const Vec&) { return 0.0; },
                     [](const Vec&, const FaceTag&) { return 0.0; },
                     {},
                     std::nullopt,
                     {}};
}

TEST(AssembleWeak, TunedHelmholtzShape) {
  const auto problem = builtin("helmholtz2d_regular");
  const Built b = build(problem, {});
  EXPECT_EQ(b.system.cols(), 160);
  EXPECT_EQ(b.system.count(RowCategory::weak), 2500u);
  EXPECT_EQ(b.system.count(RowCategory::strong), 0u);
  EXPECT_EQ(b.system.count(RowCategory::interface_deriv), 0u);
  EXPECT_EQ(b.system.count(RowCategory::interface_value), 3u * 100u);
  EXPECT_EQ(b.system.tags.size(), static_cast<std::size_t>(b.system.rows()));
  EXPECT_EQ(b.system.column_offsets, (std::vector<int>{0, 40, 80, 120, 160}));
  EXPECT_TRUE(b.system.matrix.allFinite());
}

TEST(AssembleWeak, OneDimensionalTwoSubdomains) {
  const auto problem = laplace_zero(box({0.0}, {1.0}));
  SolverConfig c;
  c.subdomains = {2, 0, 0};
  c.features = 5;
  c.tests = {3, 0, 0};
  c.boundary_partitions = {4, 0, 0};
  const Built b = build(problem, c);
  EXPECT_EQ(b.system.count(RowCategory::weak), 6u);
  EXPECT_EQ(b.system.count(RowCategory::boundary), 2u);
  EXPECT_EQ(b.system.count(RowCategory::interface_value), 1u);
  EXPECT_EQ(b.system.cols(), 10);
}

TEST(AssembleWeak, HomogeneousProblemHasZeroRhs) {
  const auto problem = laplace_zero(box({0.0, 0.0}, {1.0, 2.0}));
  SolverConfig c;
  c.subdomains = {2, 2, 0};
  c.features = 8;
  c.tests = {4, 4, 0};
  c.boundary_partitions = {6, 6, 0};
  const Built b = build(problem, c);
  EXPECT_EQ(b.system.rhs.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(b.system.matrix.cwiseAbs().maxCoeff(), 0.0);
}

TEST(AssembleWeak, WeakRowsAreBlockLocal) {
  const auto problem = builtin("helmholtz2d_regular");
  const Built b = build(problem, {});
  for (Index r = 0; r < b.system.rows(); ++r) {
    const RowTag& t = b.system.tags[static_cast<std::size_t>(r)];
    if (t.category != RowCategory::weak) continue;
    const int lo = b.system.column_offsets[t.subdomain];
    const int hi = b.system.column_offsets[t.subdomain + 1];
    for (Index j = 0; j < b.system.cols(); ++j)
      if (j < lo || j >= hi) ASSERT_EQ(b.system.matrix(r, j), 0.0);
  }
}

TEST(AssembleWeak, EntriesMatchDirectIntegration) {
  // Independent oracle: integrate phi_j * (L* psi) and f * psi node by node.
  const auto problem = builtin("manufactured_poisson2d");
  SolverConfig c;
  c.subdomains = {2, 1, 0};
  c.features = 6;
  c.tests = {3, 2, 0};
  const Built b = build(problem, c);
  int checked = 0;
  for (Index r = 0; r < b.system.rows(); ++r) {
    const RowTag& t = b.system.tags[static_cast<std::size_t>(r)];
    if (t.category != RowCategory::weak) continue;
    const auto& sub = b.dec.subdomains[t.subdomain];
    const TestFunction psi(t.subdomain, sub.box, t.index);
    const TensorRule rule(sub.box, b.config.quadrature_order);
    const double load =
        integrate([&](const Vec& x) { return problem.source(x) * psi.eval(x); }, rule);
    EXPECT_NEAR(b.system.rhs(r), load, 1e-12 * std::max(1.0, std::abs(load)));
    for (int j = 0; j < c.features; ++j) {
      const double entry = integrate(
          [&](const Vec& x) {
            return b.bases[t.subdomain].eval_feature(j, x) * apply_adjoint(problem.op, psi, x);
          },
          rule);
      const double got = b.system.matrix(r, b.system.column(t.subdomain, j));
      EXPECT_NEAR(got, entry, 1e-11 * std::max(1.0, std::abs(entry)));
    }
    ++checked;
  }
  EXPECT_EQ(checked, 12);
}

TEST(AssembleWeak, BoundaryAndInterfaceRows) {
  const auto problem = builtin("manufactured_poisson2d");
  SolverConfig c;
  c.subdomains = {2, 1, 0};
  c.features = 6;
  c.tests = {3, 2, 0};
  const Built b = build(problem, c);
  for (Index r = 0; r < b.system.rows(); ++r) {
    const RowTag& t = b.system.tags[static_cast<std::size_t>(r)];
    if (t.category == RowCategory::boundary) {
      for (int j = 0; j < c.features; ++j)
        EXPECT_EQ(b.system.matrix(r, b.system.column(t.subdomain, j)),
                  b.bases[t.subdomain].eval_feature(j, t.point));
    } else if (t.category == RowCategory::interface_value) {
      for (int j = 0; j < c.features; ++j) {
        // u_right - u_left = 0
        EXPECT_EQ(b.system.matrix(r, b.system.column(t.subdomain, j)),
                  -b.bases[t.subdomain].eval_feature(j, t.point));
        EXPECT_EQ(b.system.matrix(r, b.system.column(t.other, j)),
                  b.bases[t.other].eval_feature(j, t.point));
      }
      EXPECT_EQ(b.system.rhs(r), 0.0);
    }
  }
}

TEST(AssembleWeak, QuadratureConverged) {
  const auto problem = builtin("helmholtz2d_regular");
  SolverConfig c;
  c.tests = {10, 10, 0};
  const Built base = build(problem, c);
  c.quadrature_order = {2 * base.config.quadrature_order[0], 2 * base.config.quadrature_order[1], 0};
  const Built fine = build(problem, c);
  const auto scaled = rescale_rows(base.system, RescaleMode::max_abs);
  const auto scaled_fine = rescale_rows(fine.system, RescaleMode::max_abs);
  EXPECT_LT((scaled.matrix - scaled_fine.matrix).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(AssembleWeak, RejectsSmoothPartitions) {
  const auto problem = builtin("manufactured_poisson2d");
  SolverConfig c;
  c.pou.kind = PouKind::psi_b;
  EXPECT_THROW(build(problem, c), UnsupportedConfiguration);
}

TEST(WeakResidual, SmoothSolutionSatisfiesWeakRows) {
  const auto problem = builtin("manufactured_poisson2d");
  SolverConfig c = SolverConfig{}.resolved(problem);
  const Decomposition dec = decompose(problem.domain.bounding(), std::array{2, 2});
  const TestSet tests = build_test_set(dec, std::span<const MultiIndex>(&c.tests, 1));
  std::vector<TensorRule> rules;
  for (const auto& s : dec.subdomains) rules.emplace_back(s.box, c.quadrature_order);
  const auto u = [](const Vec& x) { return std::sin(kPi * x[0]) * std::sin(kPi * x[1]); };
  const auto grad = [](const Vec& x) {
    return Vec{kPi * std::cos(kPi * x[0]) * std::sin(kPi * x[1]),
               kPi * std::sin(kPi * x[0]) * std::cos(kPi * x[1]), 0.0};
  };
  const WeakResidual res = weak_residual(problem, dec, tests, rules, u, grad);
  ASSERT_EQ(res.residual.size(), static_cast<Index>(tests.total()));
  EXPECT_LT(res.residual.cwiseAbs().cwiseQuotient(res.scale).maxCoeff(), 1e-10);
  EXPECT_GT(res.scale.minCoeff(), 0.0);
  // A wrong candidate leaves a clear residual.
  const auto wrong = [&](const Vec& x) { return 1.1 * u(x); };
  const WeakResidual bad = weak_residual(problem, dec, tests, rules, wrong, grad);
  EXPECT_GT(bad.residual.cwiseAbs().cwiseQuotient(bad.scale).maxCoeff(), 1e-3);
}

TEST(AssembleStrong, RowsAreOperatorValues) {
  const auto problem = builtin("manufactured_poisson2d");
  SolverConfig c;
  c.pipeline = Pipeline::strong;
  c.subdomains = {2, 1, 0};
  c.features = 5;
  c.boundary_partitions = {6, 6, 0};
  const Built b = build(problem, c);
  // Interior points of a 6x6 grid in each half box, 4*6 boundary points,
  // 6 interface points with a value and a derivative row each.
  EXPECT_EQ(b.system.count(RowCategory::strong), 72u);
  EXPECT_EQ(b.system.count(RowCategory::interface_value), 6u);
  EXPECT_EQ(b.system.count(RowCategory::interface_deriv), 6u);
  for (Index r = 0; r < b.system.rows(); ++r) {
    const RowTag& t = b.system.tags[static_cast<std::size_t>(r)];
    if (t.category != RowCategory::strong) continue;
    for (int j = 0; j < c.features; ++j) {
      const double lap = b.bases[t.subdomain].eval_feature(j, t.point, {2, 0, 0}) +
                         b.bases[t.subdomain].eval_feature(j, t.point, {0, 2, 0});
      EXPECT_NEAR(b.system.matrix(r, b.system.column(t.subdomain, j)), lap,
                  1e-12 * std::max(1.0, std::abs(lap)));
    }
    EXPECT_NEAR(b.system.rhs(r), problem.source(t.point), 1e-12);
  }
}

AssembledSystem small_system() {
  AssembledSystem s;
  s.matrix.resize(3, 2);
  s.matrix << 2, -4, 0, 0, 1e-3, 5e-4;
  s.rhs = Eigen::Vector3d(8, 0, 1);
  s.tags = {{RowCategory::weak, 0, -1, {1, 1, 0}, {}},
            {RowCategory::boundary, 1, -1, {}, {0.5, 0.0, 0}},
            {RowCategory::interface_value, 0, 1, {}, {0.5, 0.5, 0}}};
  s.column_offsets = {0, 1, 2};
  return s;
}

TEST(RescaleRows, Example) {
  RescaleReport report;
  const auto out = rescale_rows(small_system(), RescaleMode::max_abs, &report);
  EXPECT_DOUBLE_EQ(out.matrix(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(out.matrix(0, 1), -1.0);
  EXPECT_DOUBLE_EQ(out.rhs(0), 2.0);
  EXPECT_DOUBLE_EQ(out.matrix(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(out.rhs(2), 1000.0);
  EXPECT_EQ(report.zero_rows, (std::vector<Index>{1}));
  EXPECT_EQ(out.rhs(1), 0.0);
}

TEST(RescaleRows, NoneIsBitExactAndMaxAbsBounded) {
  const auto in = small_system();
  const auto none = rescale_rows(in, RescaleMode::none);
  EXPECT_EQ(none.matrix, in.matrix);
  EXPECT_EQ(none.rhs, in.rhs);
  const auto problem = builtin("helmholtz2d_regular");
  const auto scaled = rescale_rows(build(problem, {}).system, RescaleMode::max_abs);
  for (Index r = 0; r < scaled.rows(); ++r)
    EXPECT_DOUBLE_EQ(scaled.matrix.row(r).cwiseAbs().maxCoeff(), 1.0);
}

TEST(CategoryWeights, ScaleOnlyTheirRows) {
  auto s = small_system();
  apply_category_weights(s, {1.0, 3.0, 0.5});
  EXPECT_EQ(s.matrix(0, 0), 2.0);
  EXPECT_EQ(s.matrix(2, 0), 5e-4);
  EXPECT_EQ(s.rhs(2), 0.5);
}

TEST(SystemDump, RoundTrip) {
  const auto problem = builtin("manufactured_poisson2d");
  SolverConfig c;
  c.subdomains = {2, 1, 0};
  c.features = 7;
  c.tests = {3, 3, 0};
  const auto sys = build(problem, c).system;
  std::stringstream buf;
  write_system(sys, buf);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 4), "WRFM");
  const std::size_t expected = 16 + 8 * (sys.matrix.size() + sys.rhs.size()) + 12 * sys.rows();
  EXPECT_EQ(bytes.size(), expected);
  const auto back = read_system(buf);
  EXPECT_EQ(back.matrix, sys.matrix);
  EXPECT_EQ(back.rhs, sys.rhs);
  ASSERT_EQ(back.tags.size(), sys.tags.size());
  for (std::size_t r = 0; r < sys.tags.size(); ++r) {
    EXPECT_EQ(back.tags[r].category, sys.tags[r].category);
    EXPECT_EQ(back.tags[r].subdomain, sys.tags[r].subdomain);
    EXPECT_EQ(back.tags[r].other, sys.tags[r].other);
  }
  std::stringstream junk("NOPE");
  EXPECT_THROW(read_system(junk), InvalidInput);
}

TEST(ContractTensor, MatchesNaiveSum) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  const int q[3] = {4, 3, 5}, k[3] = {2, 3, 2};
  Eigen::MatrixXd values(q[0] * q[1] * q[2], 2);
  for (Index i = 0; i < values.size(); ++i) values.data()[i] = n(rng);
  std::array<Eigen::MatrixXd, kMaxDim> f;
  for (int a = 0; a < 3; ++a) {
    f[a].resize(k[a], q[a]);
    for (Index i = 0; i < f[a].size(); ++i) f[a].data()[i] = n(rng);
  }
  const Eigen::MatrixXd got = contract_tensor(values, f);
  ASSERT_EQ(got.rows(), k[0] * k[1] * k[2]);
  for (int c = 0; c < 2; ++c)
    for (int k2 = 0; k2 < k[2]; ++k2)
      for (int k1 = 0; k1 < k[1]; ++k1)
        for (int k0 = 0; k0 < k[0]; ++k0) {
          double s = 0.0;
          for (int q2 = 0; q2 < q[2]; ++q2)
            for (int q1 = 0; q1 < q[1]; ++q1)
              for (int q0 = 0; q0 < q[0]; ++q0)
                s += f[0](k0, q0) * f[1](k1, q1) * f[2](k2, q2) *
                     values(q0 + q[0] * (q1 + q[1] * q2), c);
          EXPECT_NEAR(got(k0 + k[0] * (k1 + k[1] * k2), c), s, 1e-12);
        }
}

}  // namespace
}  // namespace wrfm
