#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "wrfm/benchmarks.hpp"
#include "wrfm/errors.hpp"
#include "wrfm/quadrature.hpp"
#include "wrfm/test_functions.hpp"
#include "wrfm/validation.hpp"

namespace wrfm {
namespace {

using test::box;
constexpr double kPi = std::numbers::pi;

TEST(TestSet, CountsForTunedProblems) {
  const auto regular = builtin("helmholtz2d_regular");
  const int c2[] = {4, 1};
  const auto dec2 = decompose(regular.domain.bounding(), c2);
  const MultiIndex t2[] = {regular.defaults.tests};
  const TestSet set2 = build_test_set(dec2, t2);
  EXPECT_EQ(set2.size(0), 625);
  EXPECT_EQ(set2.total(), 2500);

  const auto poisson = builtin("poisson3d");
  const int c3[] = {2, 1, 1};
  const auto dec3 = decompose(poisson.domain.bounding(), c3);
  const MultiIndex t3[] = {poisson.defaults.tests};
  const TestSet set3 = build_test_set(dec3, t3);
  EXPECT_EQ(set3.size(1), 3375);
}

TEST(TestSet, FirstFrequencyVariesFastest) {
  const int c[] = {1, 1};
  const auto dec = decompose(box({0, 0}, {1, 1}), c);
  const MultiIndex t[] = {{3, 2, 1}};
  const TestSet set = build_test_set(dec, t);
  ASSERT_EQ(set.size(0), 6);
  EXPECT_EQ(set.functions(0)[1].frequencies(), (MultiIndex{2, 1, 0}));
  EXPECT_EQ(set.functions(0)[3].frequencies(), (MultiIndex{1, 2, 0}));
}

TEST(TestSet, RejectsBadCounts) {
  const int c[] = {2, 1};
  const auto dec = decompose(box({0, 0}, {1, 1}), c);
  const MultiIndex three[] = {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
  EXPECT_THROW(build_test_set(dec, three), InvalidArgument);
  const MultiIndex zero[] = {{0, 2, 1}};
  EXPECT_THROW(build_test_set(dec, zero), InvalidArgument);
}

TEST(TestFunction, MidpointOfLowestMode) {
  const TestFunction tf(0, box({0.0, 0.0}, {0.5, 1.0}), {1, 1, 1});
  EXPECT_NEAR(tf.eval({0.25, 0.5, 0}), 1.0, 1e-15);
  const TestFunction sig(0, box({0.0, 0.0}, {0.5, 1.0}), {1, 1, 1},
                         {WindowKind::sigmoid, 0.05});
  EXPECT_NEAR(sig.eval({0.25, 0.5, 0}), 1.0, 1e-8);
}

TEST(TestFunction, VanishesWithGradientOnFaces) {
  const AxisBox b = box({-1.0, 0.0}, {-0.5, 1.0});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 1; k <= 7; k += 3) {
    const TestFunction tf(0, b, {k, k + 1, 1});
    for (int p = 0; p < 50; ++p) {
      const double t = u(rng);
      for (const Vec& x : {Vec{-1.0, t, 0}, Vec{-0.5, t, 0}, Vec{-1.0 + 0.5 * t, 0.0, 0},
                           Vec{-1.0 + 0.5 * t, 1.0, 0}}) {
        EXPECT_NEAR(tf.eval(x), 0.0, 1e-15);
        EXPECT_NEAR(tf.eval(x, {1, 0, 0}), 0.0, 1e-12);
        EXPECT_NEAR(tf.eval(x, {0, 1, 0}), 0.0, 1e-12);
      }
    }
  }
  const TestFunction sig(0, b, {2, 2, 1}, {WindowKind::sigmoid, 0.05});
  EXPECT_LT(std::abs(sig.eval({-1.0, 0.3, 0})), std::exp(-WindowFunction::kWindowEdgeDecay));
}

TEST(TestFunction, Separable) {
  const TestFunction tf(0, box({0.1, -0.2, 0.0}, {0.6, 0.3, 2.0}), {2, 3, 4},
                        {WindowKind::sigmoid, 0.1});
  std::mt19937_64 rng(9);
  for (int p = 0; p < 30; ++p) {
    const Vec x = test::uniform_point(rng, tf.box());
    for (const MultiIndex d : {MultiIndex{0, 0, 0}, MultiIndex{2, 0, 1}, MultiIndex{1, 1, 2}}) {
      double product = 1.0;
      for (int i = 0; i < 3; ++i) product *= tf.factor(i, x[i], d[i]);
      EXPECT_DOUBLE_EQ(tf.eval(x, d), product);
    }
  }
  EXPECT_THROW(tf.eval({0.2, 0, 1}, {3, 0, 0}), UnsupportedOrder);
}

TEST(TestFunction, FactorClosedForm) {
  // Cosine window: w(l) = (1 + cos(pi l)) / 2 with l the normalized coordinate.
  const WindowFunction w(0.0, 2.0);
  for (double x = 0.05; x < 2.0; x += 0.1) {
    const double l = x - 1.0;
    const double expected = 0.5 * (1.0 + std::cos(kPi * l)) * std::sin(kPi * 3.0 * x / 2.0);
    EXPECT_NEAR(windowed_sine(w, 3, x, 0), expected, 1e-15);
  }
}

class WindowDerivatives : public ::testing::TestWithParam<WindowKind> {};

TEST_P(WindowDerivatives, MatchFiniteDifferences) {
  const TestFunction tf(0, box({0.0, 0.5}, {0.25, 1.5}), {3, 2, 1}, {GetParam(), 0.05});
  std::mt19937_64 rng(4);
  for (int p = 0; p < 40; ++p) {
    const Vec x = test::uniform_point(rng, tf.box());
    for (const MultiIndex d : {MultiIndex{1, 0, 0}, MultiIndex{0, 2, 0}, MultiIndex{1, 1, 0},
                               MultiIndex{2, 0, 0}}) {
      const double exact = tf.eval(x, d);
      const double fd =
          finite_difference([&](const Vec& y) { return tf.eval(y); }, x, d, 1e-4);
      EXPECT_LT(std::abs(exact - fd), 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Both, WindowDerivatives,
                         ::testing::Values(WindowKind::cosine, WindowKind::sigmoid));

TEST(WindowQuadrature, Orders) {
  EXPECT_EQ(window_quadrature_order({WindowKind::cosine, 0.05}), 0);
  const int sharp = window_quadrature_order({WindowKind::sigmoid, 0.01});
  const int soft = window_quadrature_order({WindowKind::sigmoid, 0.2});
  EXPECT_GT(sharp, soft);
  EXPECT_LE(sharp, kMaxGaussOrder);
  EXPECT_GT(soft, 0);
}

TEST(LinearOperator, AdjointSigns) {
  const auto heat = LinearOperator::heat(2, 0.7);
  const auto adj = heat.adjoint_terms();
  ASSERT_EQ(adj.size(), heat.terms().size());
  for (std::size_t i = 0; i < adj.size(); ++i) {
    const double sign = total_order(adj[i].alpha) % 2 ? -1.0 : 1.0;
    EXPECT_EQ(adj[i].coefficient, sign * heat.terms()[i].coefficient);
  }
  // The time derivative flips sign: d_xx + d_yy + a d_t.
  bool found = false;
  for (const auto& t : adj)
    if (t.alpha == MultiIndex{0, 0, 1}) {
      EXPECT_DOUBLE_EQ(t.coefficient, 0.7);
      found = true;
    }
  EXPECT_TRUE(found);
  const auto lap = LinearOperator::laplacian(3, -2.0);
  for (std::size_t i = 0; i < lap.terms().size(); ++i)
    EXPECT_EQ(lap.adjoint_terms()[i].coefficient, lap.terms()[i].coefficient);
  EXPECT_EQ(lap.max_order(), 2);
  EXPECT_THROW(LinearOperator({}), InvalidArgument);
  EXPECT_THROW(LinearOperator({{{3, 0, 0}, 1.0}}), UnsupportedOrder);
}

TEST(ApplyAdjoint, MatchesFiniteDifferences) {
  const auto op = LinearOperator::heat(2, 1.3);
  const TestFunction tf(0, box({0.0, 0.0, 0.0}, {0.5, 1.0, 1.0}), {2, 1, 3});
  std::mt19937_64 rng(11);
  for (int p = 0; p < 30; ++p) {
    const Vec x = test::uniform_point(rng, tf.box());
    const auto f = [&](const Vec& y) { return tf.eval(y); };
    const double fd = finite_difference(f, x, {2, 0, 0}, 1e-3) +
                      finite_difference(f, x, {0, 2, 0}, 1e-3) +
                      1.3 * finite_difference(f, x, {0, 0, 1}, 1e-3);
    EXPECT_NEAR(apply_adjoint(op, tf, x), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(TestSet, LinearlyIndependent) {
  // Gram matrix of one subdomain's family is positive definite.
  const int c[] = {1, 1};
  const auto dec = decompose(box({0, 0}, {1, 1}), c);
  const MultiIndex t[] = {{6, 6, 1}};
  const TestSet set = build_test_set(dec, t);
  const TensorRule rule(dec.subdomains[0].box, {40, 40, 1});
  const int n = set.size(0);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rule.size()), n);
  for (std::size_t q = 0; q < rule.size(); ++q)
    for (int j = 0; j < n; ++j)
      values(static_cast<Eigen::Index>(q), j) =
          std::sqrt(rule.effective_weight(q)) * set.functions(0)[j].eval(rule.nodes()[q]);
  const Eigen::MatrixXd gram = values.transpose() * values;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 1e-6 * eig.eigenvalues().maxCoeff());
}

}  // namespace
}  // namespace wrfm
