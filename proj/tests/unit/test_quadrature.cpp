#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "wrfm/errors.hpp"
#include "wrfm/quadrature.hpp"

namespace wrfm {
namespace {

using test::box;
constexpr double kPi = std::numbers::pi;

TEST(GaussNodes, TwoPointRule) {
  const auto r = gauss_nodes(2, -1.0, 1.0);
  ASSERT_EQ(r.nodes.size(), 2u);
  EXPECT_NEAR(r.nodes[0], -1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r.weights[0], 1.0, 1e-15);
  EXPECT_NEAR(r.weights[1], 1.0, 1e-15);
}

TEST(GaussNodes, Examples) {
  const auto r = gauss_nodes(3, 0.0, 1.0);
  double x2 = 0.0;
  for (std::size_t i = 0; i < 3; ++i) x2 += r.weights[i] * r.nodes[i] * r.nodes[i];
  EXPECT_NEAR(x2, 1.0 / 3.0, 1e-15);
  const auto s = gauss_nodes(20, 0.0, kPi);
  double si = 0.0;
  for (std::size_t i = 0; i < 20; ++i) si += s.weights[i] * std::sin(s.nodes[i]);
  EXPECT_NEAR(si, 2.0, 1e-14);
}

TEST(GaussNodes, ExactForDegreeUpTo2QMinus1) {
  for (int q : {1, 2, 5, 13, 40, 100, 256}) {
    const auto r = gauss_nodes(q, -0.3, 1.7);
    for (int p : {0, 1, 2 * q - 1}) {
      if (p > 60) p = 60;  // keep the reference representable
      double s = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const double t = (r.nodes[i] + 0.3) / 2.0;  // map to [0, 1]
        s += r.weights[i] / 2.0 * std::pow(t, p);
      }
      EXPECT_NEAR(s, 1.0 / (p + 1), 1e-13) << "Q=" << q << " p=" << p;
    }
  }
}

TEST(GaussNodes, SortedInsideAndSymmetric) {
  for (int q : {7, 64, 256}) {
    const auto r = gauss_nodes(q, -1.0, 1.0);
    double total = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      EXPECT_GT(r.nodes[i], -1.0);
      EXPECT_LT(r.nodes[i], 1.0);
      EXPECT_GT(r.weights[i], 0.0);
      if (i) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
      EXPECT_NEAR(r.nodes[i], -r.nodes[r.nodes.size() - 1 - i], 1e-14);
      total += r.weights[i];
    }
    EXPECT_NEAR(total, 2.0, 1e-13);
  }
}

TEST(GaussNodes, RejectsBadArguments) {
  EXPECT_THROW(gauss_nodes(0, 0, 1), InvalidArgument);
  EXPECT_THROW(gauss_nodes(257, 0, 1), InvalidArgument);
  EXPECT_THROW(gauss_nodes(3, 1, 1), InvalidArgument);
}

TEST(TensorRule, PolynomialExactness) {
  const TensorRule rule(box({0.0, -1.0, 2.0}, {1.0, 1.0, 3.0}), {3, 4, 2});
  EXPECT_EQ(rule.size(), 24u);
  // Degree (5, 7, 3) monomial: x^5 y^6 z^3 integrates to 1/6 * 2/7 * (3^4 - 2^4)/4.
  const double exact = (1.0 / 6.0) * (2.0 / 7.0) * (81.0 - 16.0) / 4.0;
  const double v = integrate(
      [](const Vec& x) { return std::pow(x[0], 5) * std::pow(x[1], 6) * std::pow(x[2], 3); },
      rule);
  EXPECT_NEAR(v, exact, 1e-13);
}

TEST(TensorRule, NodeOrderAxisZeroFastest) {
  const TensorRule rule(box({0.0, 0.0}, {1.0, 1.0}), {3, 2, 1});
  EXPECT_EQ(rule.nodes()[1][1], rule.nodes()[0][1]);
  EXPECT_LT(rule.nodes()[0][0], rule.nodes()[1][0]);
  EXPECT_EQ(rule.nodes()[3][0], rule.nodes()[0][0]);
}

TEST(TensorRule, SmoothConvergence) {
  const auto f = [](const Vec& x) { return std::exp(x[0] * x[1]) * std::cos(3.0 * x[0]); };
  const double ref = integrate(f, TensorRule(box({0, 0}, {1, 1}), {60, 60, 1}));
  double prev = 1.0;
  for (int q : {2, 4, 8, 16}) {
    const double err = std::abs(integrate(f, TensorRule(box({0, 0}, {1, 1}), {q, q, 1})) - ref);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-13);
}

TEST(TensorRule, MaskedAreaConvergesAndNeverExceedsBox) {
  const Domain d(box({0, 0}, {1, 1}), {Disk{0.5, 0.5, 0.25}});
  const double exact = 1.0 - kPi * 0.0625;
  for (int q : {10, 40, 160}) {
    const TensorRule rule(d.bounding(), {q, q, 1}, &d);
    const double area = integrate([](const Vec&) { return 1.0; }, rule);
    EXPECT_LE(area, 1.0 + 1e-14);
    EXPECT_NEAR(area, exact, 3.0 / q);
  }
}

TEST(TensorRule, MaskingOnlyRemovesWeight) {
  // Shrinking the domain never increases the masked area.
  const AxisBox b = box({0, 0}, {1, 1});
  double prev = 2.0;
  for (double r : {0.05, 0.1, 0.2, 0.3}) {
    const Domain d(b, {Disk{0.5, 0.5, r}});
    const TensorRule rule(b, {50, 50, 1}, &d);
    const double area = integrate([](const Vec&) { return 1.0; }, rule);
    EXPECT_LE(area, prev);
    prev = area;
  }
}

TEST(TensorRule, ScaleWeights) {
  TensorRule rule(box({0.0}, {2.0}), {5, 1, 1});
  rule.scale_weights(1.001);
  EXPECT_NEAR(integrate([](const Vec&) { return 1.0; }, rule), 2.002, 1e-14);
}

TEST(ExclusionRules, DiskAreaAndBoundaryLength) {
  const Domain d(box({0, 0}, {1, 1}), {Disk{0.4, 0.5, 0.2}});
  const auto vol = exclusion_volume_rules(d, d.bounding(), {30, 30, 1});
  double area = 0.0;
  for (double w : vol.disks.weights) area += w;
  EXPECT_NEAR(area, kPi * 0.04, 1e-12);
  const auto bnd = exclusion_boundary_rule(d, d.bounding(), {30, 30, 1});
  double length = 0.0;
  for (const auto& n : bnd) {
    length += n.weight;
    // Normal points into the disk.
    const double rx = n.x[0] - 0.4, ry = n.x[1] - 0.5;
    EXPECT_NEAR(n.normal[0] * rx + n.normal[1] * ry, -0.2, 1e-12);
  }
  EXPECT_NEAR(length, 2.0 * kPi * 0.2, 1e-12);
}

TEST(ExclusionRules, ClippedToSubdomain) {
  // Left half of the box holds half of a centred disk.
  const Domain d(box({0, 0}, {1, 1}), {Disk{0.5, 0.5, 0.2}});
  const AxisBox left = box({0, 0}, {0.5, 1});
  const auto vol = exclusion_volume_rules(d, left, {40, 40, 1});
  double area = 0.0;
  for (double w : vol.disks.weights) area += w;
  EXPECT_NEAR(area, 0.5 * kPi * 0.04, 2e-3);
  const Domain sq(box({0, 0}, {1, 1}), {box({0.25, 0.25}, {0.75, 0.75})});
  const auto bv = exclusion_volume_rules(sq, left, {10, 10, 1});
  ASSERT_EQ(bv.boxes.size(), 1u);
  EXPECT_NEAR(integrate([](const Vec&) { return 1.0; }, bv.boxes[0]), 0.125, 1e-14);
}

}  // namespace
}  // namespace wrfm
