#pragma once

#include <span>
#include <variant>
#include <vector>

#include "wrfm/types.hpp"

namespace wrfm {

/// Axis-aligned box in 1, 2 or 3 dimensions with lo[i] < hi[i].
struct AxisBox {
  int dim = 0;
  Vec lo{};
  Vec hi{};

  /// Validating constructor; throws InvalidArgument on bad dimension or
  /// degenerate extents.
  static AxisBox make(std::span<const double> lo, std::span<const double> hi);

  double volume() const;
  Vec center() const;
  Vec half_widths() const;
  /// Closed-box membership with an absolute tolerance on every face.
  bool contains_closed(const Vec& x, double tol = 0.0) const;
};

struct Disk {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
};

/// A region removed from the bounding box. Disks are two-dimensional only.
using Exclusion = std::variant<Disk, AxisBox>;

/// Bounding box minus a set of pairwise disjoint exclusions.
class Domain {
 public:
  explicit Domain(AxisBox bounding, std::vector<Exclusion> exclusions = {});

  const AxisBox& bounding() const { return bounding_; }
  const std::vector<Exclusion>& exclusions() const { return exclusions_; }
  int dim() const { return bounding_.dim; }

  /// True iff x lies in the closed bounding box and strictly outside every
  /// exclusion. Points on an exclusion's boundary are not contained.
  bool contains(const Vec& x) const;

 private:
  AxisBox bounding_;
  std::vector<Exclusion> exclusions_;
};

struct Subdomain {
  int index = 0;
  AxisBox box;
  Vec center{};
  Vec half_widths{};

  static Subdomain from_box(int index, const AxisBox& box);

  /// Affine map of the box onto [-1,1]^d. No clamping is applied.
  Vec normalize(const Vec& x) const;
};

/// Face shared by two neighbouring subdomains. `lo`/`hi` span the face, with
/// lo[axis] == hi[axis] == position.
struct InterfaceFace {
  int axis = 0;
  double position = 0.0;
  int left = 0;
  int right = 0;
  Vec lo{};
  Vec hi{};
};

struct Decomposition {
  AxisBox bounding;
  MultiIndex counts{1, 1, 1};
  std::vector<Subdomain> subdomains;
  std::vector<InterfaceFace> interfaces;

  int dim() const { return bounding.dim; }
  int size() const { return static_cast<int>(subdomains.size()); }

  /// Index of the lowest-numbered subdomain whose closed box contains x, or
  /// -1 when x lies outside the bounding box.
  int locate(const Vec& x, double tol = 1e-12) const;
};

/// Tensor grid of equal boxes, subdomain index running fastest along axis 0.
Decomposition decompose(const AxisBox& box, std::span<const int> counts);

enum class BoundarySelect { outer, exclusions, all };

struct FaceTag {
  enum class Kind { outer, exclusion };
  Kind kind = Kind::outer;
  int axis = 0;       // outer faces and box exclusions
  int side = 0;       // 0 = lo face, 1 = hi face
  int exclusion = -1; // index into Domain::exclusions for exclusion faces
};

struct BoundaryPoint {
  Vec x{};
  FaceTag tag;
};

/// Cell-midpoint grids on the selected boundary parts. Outer face normal to
/// axis a is sampled on the grid spanned by the partitions of the other axes;
/// disks get max(partitions) equally spaced angles; box exclusions are sampled
/// face by face like the outer box. Outer points falling inside an exclusion
/// are dropped.
std::vector<BoundaryPoint> boundary_points(const Domain& domain, std::span<const int> partitions,
                                           BoundarySelect which);

struct OwnedBoundaryPoint {
  Vec x{};
  FaceTag tag;
  int owner = 0;
};

/// Boundary sampling used by the solvers: every subdomain samples those faces
/// of its own box that lie on the outer boundary with the given partitions;
/// exclusion boundaries are sampled once and assigned to the subdomain that
/// contains each point.
std::vector<OwnedBoundaryPoint> subdomain_boundary_points(const Domain& domain,
                                                          const Decomposition& dec,
                                                          std::span<const int> partitions);

struct InterfacePoint {
  Vec x{};
  int left = 0;
  int right = 0;
  int axis = 0;
};

/// Cell-midpoint grid on every interface face using the partitions of the
/// face's tangential axes.
std::vector<InterfacePoint> interface_points(const Decomposition& dec,
                                             std::span<const int> partitions);

/// Cell-midpoint grid inside a box, filtered by domain membership.
std::vector<Vec> interior_points(const Domain& domain, const AxisBox& box,
                                 std::span<const int> partitions);

}  // namespace wrfm
