#pragma once

#include <functional>
#include <vector>

#include "wrfm/geometry.hpp"
#include "wrfm/types.hpp"

namespace wrfm {

struct GaussRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr int kMaxGaussOrder = 256;

/// Q-point Gauss-Legendre rule mapped affinely onto [a, b]. 1 <= Q <= 256.
GaussRule1D gauss_nodes(int order, double a, double b);

/// Per-axis order used when the configuration says "auto".
inline int default_quadrature_order(int test_count) {
  return test_count * 3 + 10 > 40 ? test_count * 3 + 10 : 40;
}

/// Tensor-product Gauss-Legendre rule on a box. Flattened node index runs
/// fastest along axis 0. Nodes outside the optional domain are masked.
class TensorRule {
 public:
  TensorRule(const AxisBox& box, const MultiIndex& orders, const Domain* mask_domain = nullptr);

  int dim() const { return box_.dim; }
  const AxisBox& box() const { return box_; }
  const GaussRule1D& axis_rule(int axis) const { return axes_[axis]; }
  int axis_size(int axis) const { return axis < dim() ? static_cast<int>(axes_[axis].nodes.size()) : 1; }
  std::size_t size() const { return nodes_.size(); }

  const std::vector<Vec>& nodes() const { return nodes_; }
  /// Product weights before masking.
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<char>& mask() const { return mask_; }
  /// weight * mask.
  double effective_weight(std::size_t i) const { return mask_[i] ? weights_[i] : 0.0; }

  /// Test hook: multiply every weight by `factor` (fault injection).
  void scale_weights(double factor);

 private:
  AxisBox box_;
  std::vector<GaussRule1D> axes_;
  std::vector<Vec> nodes_;
  std::vector<double> weights_;
  std::vector<char> mask_;
};

/// Node on the boundary of an exclusion, with the unit normal pointing out
/// of the domain (into the exclusion).
struct BoundaryNode {
  Vec x{};
  Vec normal{};
  double weight = 0.0;
};

/// Quadrature for the part of every exclusion boundary that lies inside the
/// closed box. Box faces use tensor Gauss rules with the box's per-axis
/// orders on the clipped face; disks use the periodic trapezoid rule with
/// max(orders) equally spaced angles.
std::vector<BoundaryNode> exclusion_boundary_rule(const Domain& domain, const AxisBox& box,
                                                  const MultiIndex& orders);

/// Unstructured nodes and weights.
struct PointRule {
  std::vector<Vec> nodes;
  std::vector<double> weights;
};

/// Rules integrating over the part of every exclusion inside the box: a
/// tensor Gauss rule per clipped box exclusion, and polar rules (Gauss in
/// radius, trapezoid in angle) for disks with nodes outside the box dropped.
struct ExclusionRules {
  std::vector<TensorRule> boxes;
  PointRule disks;
};

ExclusionRules exclusion_volume_rules(const Domain& domain, const AxisBox& box,
                                      const MultiIndex& orders);

/// Sum over unmasked nodes of weight * f(node), Neumaier-compensated in node
/// order.
double integrate(const std::function<double(const Vec&)>& f, const TensorRule& rule);

}  // namespace wrfm
