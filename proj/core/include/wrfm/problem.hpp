#pragma once

#include <functional>
#include <optional>
#include <string>

#include "wrfm/geometry.hpp"
#include "wrfm/test_functions.hpp"
#include "wrfm/types.hpp"

namespace wrfm {

using ScalarField = std::function<double(const Vec&)>;
using BoundaryField = std::function<double(const Vec&, const FaceTag&)>;

/// Hyperparameters a problem ships with (one row of the tuned table).
struct ProblemDefaults {
  MultiIndex subdomains{1, 1, 1};
  int features = 100;
  MultiIndex tests{1, 1, 1};
  MultiIndex boundary_partitions{1, 1, 1};
  MultiIndex metric_grid{2, 2, 2};
  double feature_range = 1.0;
  double rcond = 1e-12;
};

/// Linear Dirichlet problem L u = f in the domain, u = g on the boundary.
struct ProblemSpec {
  std::string name;
  Domain domain;
  LinearOperator op;
  ScalarField source;
  BoundaryField dirichlet;
  /// Faces where the Dirichlet data is imposed; empty means every face.
  std::function<bool(const FaceTag&)> face_applies;
  std::optional<ScalarField> reference;
  ProblemDefaults defaults;

  int dim() const { return domain.dim(); }
  bool applies(const FaceTag& tag) const { return !face_applies || face_applies(tag); }
};

}  // namespace wrfm
