#include "wrfm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wrfm/errors.hpp"

namespace wrfm {

namespace {

void check_partitions(std::span<const int> partitions, int dim) {
  if (static_cast<int>(partitions.size()) < dim)
    throw InvalidArgument("expected " + std::to_string(dim) + " partition counts, got " +
                          std::to_string(partitions.size()));
  for (int i = 0; i < dim; ++i)
    if (partitions[i] < 1) throw InvalidArgument("partition counts must be >= 1");
}

double midpoint(double lo, double hi, int i, int n) { return lo + (hi - lo) * (i + 0.5) / n; }

/// Midpoint grid over the axes in `axes`, all other coordinates copied from
/// `base`. Axis order: first listed axis runs fastest.
std::vector<Vec> midpoint_grid(const Vec& base, const Vec& lo, const Vec& hi,
                               std::span<const int> axes, std::span<const int> partitions) {
  std::vector<Vec> out;
  std::size_t total = 1;
  for (int a : axes) total *= static_cast<std::size_t>(partitions[a]);
  out.reserve(total);
  std::array<int, kMaxDim> idx{};
  for (std::size_t c = 0; c < total; ++c) {
    Vec p = base;
    for (std::size_t t = 0; t < axes.size(); ++t) {
      const int a = axes[t];
      p[a] = midpoint(lo[a], hi[a], idx[t], partitions[a]);
    }
    out.push_back(p);
    for (std::size_t t = 0; t < axes.size(); ++t) {
      if (++idx[t] < partitions[axes[t]]) break;
      idx[t] = 0;
    }
  }
  return out;
}

std::vector<int> tangential_axes(int dim, int normal) {
  std::vector<int> axes;
  for (int a = 0; a < dim; ++a)
    if (a != normal) axes.push_back(a);
  return axes;
}

/// Points on the face of `box` normal to `axis` on `side`.
std::vector<Vec> box_face_points(const AxisBox& box, int axis, int side,
                                 std::span<const int> partitions) {
  Vec base{};
  base[axis] = side == 0 ? box.lo[axis] : box.hi[axis];
  const auto axes = tangential_axes(box.dim, axis);
  return midpoint_grid(base, box.lo, box.hi, axes, partitions);
}

bool boxes_overlap(const AxisBox& a, const AxisBox& b) {
  for (int i = 0; i < a.dim; ++i)
    if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i]) return false;
  return true;
}

double disk_box_distance(const Disk& d, const AxisBox& b) {
  const double qx = std::clamp(d.cx, b.lo[0], b.hi[0]);
  const double qy = std::clamp(d.cy, b.lo[1], b.hi[1]);
  return std::hypot(d.cx - qx, d.cy - qy);
}

bool exclusions_disjoint(const Exclusion& a, const Exclusion& b) {
  if (const auto* da = std::get_if<Disk>(&a)) {
    if (const auto* db = std::get_if<Disk>(&b))
      return std::hypot(da->cx - db->cx, da->cy - db->cy) > da->radius + db->radius;
    return disk_box_distance(*da, std::get<AxisBox>(b)) > da->radius;
  }
  const auto& ba = std::get<AxisBox>(a);
  if (const auto* db = std::get_if<Disk>(&b)) return disk_box_distance(*db, ba) > db->radius;
  return !boxes_overlap(ba, std::get<AxisBox>(b));
}

}  // namespace

AxisBox AxisBox::make(std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != hi.size() || lo.empty() || lo.size() > kMaxDim)
    throw InvalidArgument("axis box needs matching lo/hi of dimension 1..3");
  AxisBox box;
  box.dim = static_cast<int>(lo.size());
  for (int i = 0; i < box.dim; ++i) {
    if (!(lo[i] < hi[i]))
      throw InvalidArgument("axis box requires lo < hi on axis " + std::to_string(i));
    box.lo[i] = lo[i];
    box.hi[i] = hi[i];
  }
  return box;
}

double AxisBox::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= hi[i] - lo[i];
  return v;
}

Vec AxisBox::center() const {
  Vec c{};
  for (int i = 0; i < dim; ++i) c[i] = 0.5 * (lo[i] + hi[i]);
  return c;
}

Vec AxisBox::half_widths() const {
  Vec r{};
  for (int i = 0; i < dim; ++i) r[i] = 0.5 * (hi[i] - lo[i]);
  return r;
}

bool AxisBox::contains_closed(const Vec& x, double tol) const {
  for (int i = 0; i < dim; ++i)
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  return true;
}

Domain::Domain(AxisBox bounding, std::vector<Exclusion> exclusions)
    : bounding_(bounding), exclusions_(std::move(exclusions)) {
  if (bounding_.dim < 1 || bounding_.dim > kMaxDim)
    throw InvalidArgument("domain dimension must be 1..3");
  for (const auto& ex : exclusions_) {
    if (const auto* d = std::get_if<Disk>(&ex)) {
      if (bounding_.dim != 2) throw InvalidArgument("disk exclusions require a 2D domain");
      if (!(d->radius > 0.0)) throw InvalidArgument("disk radius must be positive");
      if (d->cx - d->radius <= bounding_.lo[0] || d->cx + d->radius >= bounding_.hi[0] ||
          d->cy - d->radius <= bounding_.lo[1] || d->cy + d->radius >= bounding_.hi[1])
        throw InvalidArgument("disk exclusion must lie strictly inside the bounding box");
    } else {
      const auto& b = std::get<AxisBox>(ex);
      if (b.dim != bounding_.dim) throw InvalidArgument("box exclusion dimension mismatch");
      for (int i = 0; i < b.dim; ++i)
        if (b.lo[i] <= bounding_.lo[i] || b.hi[i] >= bounding_.hi[i])
          throw InvalidArgument("box exclusion must lie strictly inside the bounding box");
    }
  }
  for (std::size_t i = 0; i < exclusions_.size(); ++i)
    for (std::size_t j = i + 1; j < exclusions_.size(); ++j)
      if (!exclusions_disjoint(exclusions_[i], exclusions_[j]))
        throw InvalidArgument("exclusions " + std::to_string(i) + " and " + std::to_string(j) +
                              " overlap");
}

bool Domain::contains(const Vec& x) const {
  if (!bounding_.contains_closed(x)) return false;
  for (const auto& ex : exclusions_) {
    if (const auto* d = std::get_if<Disk>(&ex)) {
      if (!(std::hypot(x[0] - d->cx, x[1] - d->cy) > d->radius)) return false;
    } else if (std::get<AxisBox>(ex).contains_closed(x)) {
      return false;
    }
  }
  return true;
}

Subdomain Subdomain::from_box(int index, const AxisBox& box) {
  return Subdomain{index, box, box.center(), box.half_widths()};
}

Vec Subdomain::normalize(const Vec& x) const {
  Vec l{};
  for (int i = 0; i < box.dim; ++i) l[i] = (x[i] - center[i]) / half_widths[i];
  return l;
}

int Decomposition::locate(const Vec& x, double tol) const {
  for (const auto& s : subdomains)
    if (s.box.contains_closed(x, tol)) return s.index;
  return -1;
}

Decomposition decompose(const AxisBox& box, std::span<const int> counts) {
  const int dim = box.dim;
  if (static_cast<int>(counts.size()) < dim)
    throw InvalidArgument("decompose: expected one count per axis");
  Decomposition dec;
  dec.bounding = box;
  for (int i = 0; i < dim; ++i) {
    if (counts[i] < 1) throw InvalidArgument("decompose: zero subdomain count on axis " +
                                             std::to_string(i));
    dec.counts[i] = counts[i];
  }
  const int total = dec.counts[0] * dec.counts[1] * dec.counts[2];
  const auto edge = [&](int axis, int i) {
    if (i == dec.counts[axis]) return box.hi[axis];
    return box.lo[axis] + (box.hi[axis] - box.lo[axis]) * i / dec.counts[axis];
  };
  const auto flat = [&](const MultiIndex& c) {
    return c[0] + dec.counts[0] * (c[1] + dec.counts[1] * c[2]);
  };
  dec.subdomains.reserve(total);
  for (int n = 0; n < total; ++n) {
    const MultiIndex c{n % dec.counts[0], (n / dec.counts[0]) % dec.counts[1],
                       n / (dec.counts[0] * dec.counts[1])};
    AxisBox sub{dim, {}, {}};
    for (int i = 0; i < dim; ++i) {
      sub.lo[i] = edge(i, c[i]);
      sub.hi[i] = edge(i, c[i] + 1);
    }
    dec.subdomains.push_back(Subdomain::from_box(n, sub));
  }
  for (int n = 0; n < total; ++n) {
    const auto& s = dec.subdomains[n];
    const MultiIndex c{n % dec.counts[0], (n / dec.counts[0]) % dec.counts[1],
                       n / (dec.counts[0] * dec.counts[1])};
    for (int axis = 0; axis < dim; ++axis) {
      if (c[axis] + 1 >= dec.counts[axis]) continue;
      MultiIndex nb = c;
      ++nb[axis];
      InterfaceFace face;
      face.axis = axis;
      face.position = s.box.hi[axis];
      face.left = n;
      face.right = flat(nb);
      face.lo = s.box.lo;
      face.hi = s.box.hi;
      face.lo[axis] = face.hi[axis] = face.position;
      dec.interfaces.push_back(face);
    }
  }
  return dec;
}

std::vector<BoundaryPoint> boundary_points(const Domain& domain, std::span<const int> partitions,
                                           BoundarySelect which) {
  const int dim = domain.dim();
  check_partitions(partitions, dim);
  std::vector<BoundaryPoint> out;
  if (which != BoundarySelect::exclusions) {
    for (int axis = 0; axis < dim; ++axis)
      for (int side = 0; side < 2; ++side)
        for (const auto& p : box_face_points(domain.bounding(), axis, side, partitions))
          if (domain.contains(p))
            out.push_back({p, {FaceTag::Kind::outer, axis, side, -1}});
  }
  if (which != BoundarySelect::outer) {
    const int max_part = *std::max_element(partitions.begin(), partitions.begin() + dim);
    for (std::size_t e = 0; e < domain.exclusions().size(); ++e) {
      const auto& ex = domain.exclusions()[e];
      if (const auto* d = std::get_if<Disk>(&ex)) {
        for (int i = 0; i < max_part; ++i) {
          const double theta = 2.0 * std::numbers::pi * i / max_part;
          Vec p{d->cx + d->radius * std::cos(theta), d->cy + d->radius * std::sin(theta), 0.0};
          out.push_back({p, {FaceTag::Kind::exclusion, 0, 0, static_cast<int>(e)}});
        }
      } else {
        const auto& b = std::get<AxisBox>(ex);
        for (int axis = 0; axis < dim; ++axis)
          for (int side = 0; side < 2; ++side)
            for (const auto& p : box_face_points(b, axis, side, partitions))
              out.push_back({p, {FaceTag::Kind::exclusion, axis, side, static_cast<int>(e)}});
      }
    }
  }
  return out;
}

std::vector<OwnedBoundaryPoint> subdomain_boundary_points(const Domain& domain,
                                                          const Decomposition& dec,
                                                          std::span<const int> partitions) {
  const int dim = domain.dim();
  check_partitions(partitions, dim);
  const AxisBox& outer = domain.bounding();
  std::vector<OwnedBoundaryPoint> out;
  for (const auto& s : dec.subdomains) {
    for (int axis = 0; axis < dim; ++axis) {
      for (int side = 0; side < 2; ++side) {
        const double pos = side == 0 ? s.box.lo[axis] : s.box.hi[axis];
        const double wall = side == 0 ? outer.lo[axis] : outer.hi[axis];
        if (pos != wall) continue;
        for (const auto& p : box_face_points(s.box, axis, side, partitions))
          if (domain.contains(p))
            out.push_back({p, {FaceTag::Kind::outer, axis, side, -1}, s.index});
      }
    }
  }
  for (const auto& bp : boundary_points(domain, partitions, BoundarySelect::exclusions)) {
    const int owner = dec.locate(bp.x);
    if (owner < 0) throw InternalError("exclusion boundary point outside every subdomain");
    out.push_back({bp.x, bp.tag, owner});
  }
  return out;
}

std::vector<InterfacePoint> interface_points(const Decomposition& dec,
                                             std::span<const int> partitions) {
  check_partitions(partitions, dec.dim());
  std::vector<InterfacePoint> out;
  for (const auto& face : dec.interfaces) {
    Vec base{};
    base[face.axis] = face.position;
    const auto axes = tangential_axes(dec.dim(), face.axis);
    for (const auto& p : midpoint_grid(base, face.lo, face.hi, axes, partitions))
      out.push_back({p, face.left, face.right, face.axis});
  }
  return out;
}

std::vector<Vec> interior_points(const Domain& domain, const AxisBox& box,
                                 std::span<const int> partitions) {
  check_partitions(partitions, box.dim);
  std::vector<int> axes(box.dim);
  for (int i = 0; i < box.dim; ++i) axes[i] = i;
  auto grid = midpoint_grid(Vec{}, box.lo, box.hi, axes, partitions);
  std::erase_if(grid, [&](const Vec& p) { return !domain.contains(p); });
  return grid;
}

}  // namespace wrfm
