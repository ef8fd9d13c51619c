#include "wrfm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wrfm/errors.hpp"

namespace wrfm {

namespace {

/// Legendre P_n(x) and its derivative by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

GaussRule1D gauss_nodes(int order, double a, double b) {
  if (order < 1 || order > kMaxGaussOrder)
    throw InvalidArgument("Gauss-Legendre order must be in [1, 256], got " + std::to_string(order));
  if (!(a < b)) throw InvalidArgument("Gauss-Legendre interval must satisfy a < b");
  GaussRule1D rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  if (order == 1) {
    rule.nodes[0] = mid;
    rule.weights[0] = 2.0 * half;
    return rule;
  }
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const auto [p, d] = legendre(order, x);
      dp = d;
      const double dx = p / d;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    dp = legendre(order, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[order - 1 - i] = mid + half * x;
    rule.weights[i] = rule.weights[order - 1 - i] = w * half;
  }
  if (order % 2 == 1) rule.nodes[m - 1] = mid;
  return rule;
}

TensorRule::TensorRule(const AxisBox& box, const MultiIndex& orders, const Domain* mask_domain)
    : box_(box) {
  for (int i = 0; i < box.dim; ++i) axes_.push_back(gauss_nodes(orders[i], box.lo[i], box.hi[i]));
  const int n0 = axis_size(0);
  const int n1 = axis_size(1);
  const int n2 = axis_size(2);
  const std::size_t total = static_cast<std::size_t>(n0) * n1 * n2;
  nodes_.resize(total);
  weights_.resize(total);
  mask_.resize(total);
  std::size_t idx = 0;
  for (int c = 0; c < n2; ++c)
    for (int b = 0; b < n1; ++b)
      for (int a = 0; a < n0; ++a, ++idx) {
        Vec x{};
        double w = axes_[0].weights[a];
        x[0] = axes_[0].nodes[a];
        if (box.dim > 1) {
          x[1] = axes_[1].nodes[b];
          w *= axes_[1].weights[b];
        }
        if (box.dim > 2) {
          x[2] = axes_[2].nodes[c];
          w *= axes_[2].weights[c];
        }
        nodes_[idx] = x;
        weights_[idx] = w;
        mask_[idx] = mask_domain == nullptr || mask_domain->contains(x);
      }
}

void TensorRule::scale_weights(double factor) {
  for (auto& w : weights_) w *= factor;
}

std::vector<BoundaryNode> exclusion_boundary_rule(const Domain& domain, const AxisBox& box,
                                                  const MultiIndex& orders) {
  const int dim = box.dim;
  std::vector<BoundaryNode> out;
  for (const auto& ex : domain.exclusions()) {
    if (const auto* disk = std::get_if<Disk>(&ex)) {
      const int n = std::max(orders[0], orders[1]);
      const double w = 2.0 * std::numbers::pi * disk->radius / n;
      for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * (i + 0.5) / n;
        BoundaryNode node;
        node.x = {disk->cx + disk->radius * std::cos(t), disk->cy + disk->radius * std::sin(t), 0.0};
        node.normal = {-std::cos(t), -std::sin(t), 0.0};
        node.weight = w;
        if (box.contains_closed(node.x)) out.push_back(node);
      }
      continue;
    }
    const auto& hole = std::get<AxisBox>(ex);
    for (int axis = 0; axis < dim; ++axis) {
      std::vector<int> tangential;
      for (int i = 0; i < dim; ++i)
        if (i != axis) tangential.push_back(i);
      // Clipped face extent and rule on each tangential axis.
      std::vector<GaussRule1D> rules;
      bool empty = false;
      for (const int t : tangential) {
        const double lo = std::max(hole.lo[t], box.lo[t]);
        const double hi = std::min(hole.hi[t], box.hi[t]);
        if (!(lo < hi)) {
          empty = true;
          break;
        }
        rules.push_back(gauss_nodes(orders[t], lo, hi));
      }
      if (empty) continue;
      for (int side = 0; side < 2; ++side) {
        const double pos = side == 0 ? hole.lo[axis] : hole.hi[axis];
        if (pos < box.lo[axis] || pos > box.hi[axis]) continue;
        BoundaryNode node;
        node.x[axis] = pos;
        node.normal[axis] = side == 0 ? 1.0 : -1.0;
        const std::size_t n0 = rules.empty() ? 1 : rules[0].nodes.size();
        const std::size_t n1 = rules.size() < 2 ? 1 : rules[1].nodes.size();
        for (std::size_t b = 0; b < n1; ++b)
          for (std::size_t a = 0; a < n0; ++a) {
            node.weight = 1.0;
            if (!rules.empty()) {
              node.x[tangential[0]] = rules[0].nodes[a];
              node.weight *= rules[0].weights[a];
            }
            if (rules.size() > 1) {
              node.x[tangential[1]] = rules[1].nodes[b];
              node.weight *= rules[1].weights[b];
            }
            out.push_back(node);
          }
      }
    }
  }
  return out;
}

ExclusionRules exclusion_volume_rules(const Domain& domain, const AxisBox& box,
                                      const MultiIndex& orders) {
  ExclusionRules out;
  const int dim = box.dim;
  for (const auto& ex : domain.exclusions()) {
    if (const auto* disk = std::get_if<Disk>(&ex)) {
      const int angles = std::max(orders[0], orders[1]);
      const int radii = std::max(angles / 2, 8);
      const GaussRule1D radial = gauss_nodes(radii, 0.0, disk->radius);
      const double dtheta = 2.0 * std::numbers::pi / angles;
      for (int i = 0; i < angles; ++i) {
        const double t = dtheta * (i + 0.5);
        for (int r = 0; r < radii; ++r) {
          const double rho = radial.nodes[r];
          const Vec x{disk->cx + rho * std::cos(t), disk->cy + rho * std::sin(t), 0.0};
          if (!box.contains_closed(x)) continue;
          out.disks.nodes.push_back(x);
          out.disks.weights.push_back(radial.weights[r] * rho * dtheta);
        }
      }
      continue;
    }
    const auto& hole = std::get<AxisBox>(ex);
    AxisBox clipped = box;
    bool empty = false;
    for (int i = 0; i < dim; ++i) {
      clipped.lo[i] = std::max(hole.lo[i], box.lo[i]);
      clipped.hi[i] = std::min(hole.hi[i], box.hi[i]);
      if (!(clipped.lo[i] < clipped.hi[i])) empty = true;
    }
    if (!empty) out.boxes.emplace_back(clipped, orders);
  }
  return out;
}

double integrate(const std::function<double(const Vec&)>& f, const TensorRule& rule) {
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    if (!rule.mask()[i]) continue;
    const double term = rule.weights()[i] * f(rule.nodes()[i]);
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term))
      comp += (sum - t) + term;
    else
      comp += (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

}  // namespace wrfm
