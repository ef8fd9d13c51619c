#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wrfm/geometry.hpp"
#include "wrfm/types.hpp"

namespace wrfm {

enum class Activation { tanh, sin, cos };

Activation parse_activation(std::string_view name);
std::string_view to_string(Activation a);

/// order-th derivative (0..2) of the activation at z.
double activation_derivative(Activation a, double z, int order);

/// sigma(k . l + b) with k and b drawn once and then frozen.
struct RandomFeature {
  Vec k{};
  double b = 0.0;
};

enum class PouKind { psi_a, psi_b, psi_c };

PouKind parse_pou(std::string_view name);
std::string_view to_string(PouKind k);

struct PartitionOfUnity {
  PouKind kind = PouKind::psi_a;
  double alpha = 0.05;  // sharpness of psi_c
};

/// One-dimensional partition-of-unity profile and its derivatives in the
/// normalized coordinate.
double pou_1d(const PartitionOfUnity& pou, double l, int order);

/// Tensor product of pou_1d over the first `dim` axes. psi_a only supports
/// deriv = 0.
double pou_value(const PartitionOfUnity& pou, const Vec& l, int dim, const MultiIndex& deriv);

/// Counter-based uniform draw on [-range, range] keyed by
/// (seed, subdomain, feature, component). Independent of call order.
double keyed_uniform(std::uint64_t seed, std::uint64_t subdomain, std::uint64_t feature,
                     std::uint64_t component, double range);

/// Random features attached to one subdomain, evaluated in that subdomain's
/// normalized coordinates.
class SubdomainBasis {
 public:
  SubdomainBasis(Subdomain sub, std::vector<RandomFeature> features, Activation activation,
                 PartitionOfUnity pou);

  const Subdomain& subdomain() const { return sub_; }
  const std::vector<RandomFeature>& features() const { return features_; }
  Activation activation() const { return activation_; }
  const PartitionOfUnity& pou() const { return pou_; }
  int size() const { return static_cast<int>(features_.size()); }
  int dim() const { return sub_.box.dim; }

  /// Physical-coordinate derivative of feature j at x (|deriv| <= 2).
  double eval_feature(int j, const Vec& x, const MultiIndex& deriv = {}) const;

  /// All features at x; `out` must hold size() entries.
  void eval_all(const Vec& x, const MultiIndex& deriv, std::span<double> out) const;

  /// Feature values at many points: rows = points, cols = features.
  Eigen::MatrixXd eval_matrix(std::span<const Vec> points) const;

  /// Partition-of-unity weight of this subdomain at physical x, with
  /// physical-coordinate derivatives.
  double pou_at(const Vec& x, const MultiIndex& deriv = {}) const;

 private:
  Subdomain sub_;
  std::vector<RandomFeature> features_;
  Activation activation_;
  PartitionOfUnity pou_;
};

SubdomainBasis sample_basis(const Subdomain& sub, int num_features, double range,
                            std::uint64_t seed, Activation activation, PartitionOfUnity pou);

/// Partition-of-unity combination of per-subdomain random-feature expansions.
class GlobalModel {
 public:
  GlobalModel(Decomposition dec, std::vector<SubdomainBasis> bases);

  const Decomposition& decomposition() const { return dec_; }
  const std::vector<SubdomainBasis>& bases() const { return bases_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  void set_coefficients(Eigen::VectorXd u);

  int num_columns() const { return offsets_.back(); }
  /// First column of subdomain n's block.
  int column_offset(int n) const { return offsets_[n]; }

  /// u_M(x). With psi_a only the lowest-index subdomain containing x
  /// contributes.
  double eval(const Vec& x) const;

 private:
  Decomposition dec_;
  std::vector<SubdomainBasis> bases_;
  std::vector<int> offsets_;
  Eigen::VectorXd coefficients_;
};

}  // namespace wrfm
