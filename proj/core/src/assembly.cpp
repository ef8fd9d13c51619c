#include "wrfm/assembly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include "wrfm/errors.hpp"
#include "wrfm/quadrature.hpp"

namespace wrfm {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

int binomial(int n, int k) { return (k == 0 || k == n) ? 1 : n; }  // n <= 2

/// Per-axis table G(k-1, q) = d^order/dx^order of the k-th windowed sine at
/// the quadrature nodes of `axis`.
MatrixXd factor_table(const TestFunction& prototype_axis_owner, int axis, int count,
                      const GaussRule1D& rule, int order) {
  const auto& w = prototype_axis_owner.window(axis);
  MatrixXd g(count, static_cast<Index>(rule.nodes.size()));
  for (int k = 1; k <= count; ++k)
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
      g(k - 1, static_cast<Index>(q)) = windowed_sine(w, k, rule.nodes[q], order);
  return g;
}

/// Values of (psi_n * phi_nj) derivatives at x for every feature j of block n,
/// by the Leibniz rule. Only derivatives of total order <= 2 are requested.
void blended_derivative(const SubdomainBasis& basis, const Vec& x, const MultiIndex& alpha,
                        std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> phi(basis.size());
  MultiIndex beta{};
  for (beta[0] = 0; beta[0] <= alpha[0]; ++beta[0])
    for (beta[1] = 0; beta[1] <= alpha[1]; ++beta[1])
      for (beta[2] = 0; beta[2] <= alpha[2]; ++beta[2]) {
        double c = 1.0;
        MultiIndex rest{};
        for (int i = 0; i < kMaxDim; ++i) {
          c *= binomial(alpha[i], beta[i]);
          rest[i] = alpha[i] - beta[i];
        }
        const double psi = basis.pou_at(x, beta);
        if (psi == 0.0) continue;
        basis.eval_all(x, rest, phi);
        for (int j = 0; j < basis.size(); ++j) out[j] += c * psi * phi[j];
      }
}

/// C with  sum_terms [phi, grad phi] C [u, grad u]^T  equal to the boundary
/// integrand left by moving the operator from u onto phi, for outward
/// normal n.
Eigen::Matrix4d boundary_coupling(const LinearOperator& op, const Vec& n) {
  Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
  for (const auto& term : op.terms()) {
    int axes[2] = {-1, -1};
    int found = 0;
    for (int i = 0; i < kMaxDim; ++i)
      for (int r = 0; r < term.alpha[i]; ++r) axes[found++] = i;
    const double a = term.coefficient;
    if (found == 1) {
      c(0, 0) += a * n[axes[0]];
    } else if (found == 2) {
      const int i = axes[0], j = axes[1];
      c(0, 1 + j) += a * n[i];
      c(1 + i, 0) -= a * n[j];
    }
  }
  return c;
}

std::vector<int> column_offsets(std::span<const SubdomainBasis> bases) {
  std::vector<int> off{0};
  for (const auto& b : bases) off.push_back(off.back() + b.size());
  return off;
}

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) throw InvalidInput("truncated system dump");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

/// Columns the weak rows are integrated against: the random features of one
/// block, or a single closed-form function.
struct ColumnSource {
  Index cols = 0;
  std::function<MatrixXd(std::span<const Vec>)> values;
  std::function<void(const Vec&, const MultiIndex&, std::span<double>)> eval;
};

struct WeakBlock {
  MatrixXd volume;    // integral of column * L* test
  MatrixXd boundary;  // integration-by-parts terms on exclusion boundaries
  Eigen::VectorXd load;
};

WeakBlock weak_block(const ProblemSpec& problem, const AxisBox& box,
                     const std::vector<TestFunction>& family, const MultiIndex& counts,
                     const TensorRule& rule, HoleQuadrature hole_quadrature,
                     const ColumnSource& source, bool magnitude = false) {
  // magnitude: accumulate |term| for every product the quadrature sums, the
  // scale that round-off in the plain sums is relative to.
  const auto mag = [magnitude](auto&& m) -> MatrixXd {
    if (magnitude) return m.cwiseAbs();
    return m;
  };
  const int dim = box.dim;
  const auto adjoint = problem.op.adjoint_terms();
  const TestFunction& proto = family.front();
  const Index k01 = static_cast<Index>(counts[0]) * counts[1];
  const Index k_n = static_cast<Index>(family.size());
  const Index cols = source.cols;
  WeakBlock out{MatrixXd::Zero(k_n, cols), MatrixXd::Zero(k_n, cols),
                Eigen::VectorXd::Zero(k_n)};
  MatrixXd& block = out.volume;
  Eigen::VectorXd& load = out.load;

  // Terms grouped by their orders on axes 0 and 1; group 0 is (0, 0) and
  // also carries the load vector.
  struct Group {
    int a0, a1;
    std::vector<std::pair<int, double>> last;  // (order on axis 2, coefficient)
  };
  std::vector<Group> groups{{0, 0, {}}};
  for (const auto& term : adjoint) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.a0 == term.alpha[0] && g.a1 == term.alpha[1];
    });
    if (it == groups.end()) it = groups.insert(groups.end(), {term.alpha[0], term.alpha[1], {}});
    it->last.emplace_back(term.alpha[2], term.coefficient);
  }

  // Weighted column values with the weighted source as the last column.
  const auto weighted_values = [&](std::span<const Vec> nodes, const auto& weight) {
    MatrixXd values = source.values(nodes);
    values.conservativeResize(Eigen::NoChange, cols + 1);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double w = weight(q);
      const auto qi = static_cast<Index>(q);
      if (w == 0.0) {
        values.row(qi).setZero();
        continue;
      }
      values.row(qi).head(cols) *= w;
      values(qi, cols) = w * problem.source(nodes[q]);
    }
    return mag(values);
  };

  // Adds sign times the integral over a tensor rule, streaming one slab of
  // nodes (fixed index on axis 2) at a time.
  const auto accumulate_tensor = [&](const TensorRule& r, double sign, bool masked) {
    std::array<std::array<MatrixXd, 3>, kMaxDim> tables;
    for (int axis = 0; axis < kMaxDim; ++axis)
      for (int order = 0; order <= 2; ++order)
        tables[axis][order] = axis < dim ? mag(factor_table(proto, axis, counts[axis],
                                                            r.axis_rule(axis), order))
                                         : MatrixXd::Ones(1, 1);
    const std::size_t slab = static_cast<std::size_t>(r.axis_size(0)) * r.axis_size(1);
    for (int s = 0; s < r.axis_size(2); ++s) {
      const std::size_t first = static_cast<std::size_t>(s) * slab;
      const MatrixXd values = weighted_values(
          std::span<const Vec>(r.nodes().data() + first, slab), [&](std::size_t q) {
            return sign * (masked ? r.effective_weight(first + q) : r.weights()[first + q]);
          });
      for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& g = groups[gi];
        if (gi > 0 && g.last.empty()) continue;
        const MatrixXd y = contract_tensor(
            values, {tables[0][g.a0], tables[1][g.a1], MatrixXd::Ones(1, 1)});
        for (auto [a2, coefficient] : g.last) {
          if (magnitude) coefficient = std::abs(coefficient);
          const MatrixXd& f2 = tables[2][a2];
          for (Index k2 = 0; k2 < f2.rows(); ++k2)
            block.middleRows(k2 * k01, k01) += (coefficient * f2(k2, s)) * y.leftCols(cols);
        }
        if (gi == 0) {
          const MatrixXd& f2 = tables[2][0];
          for (Index k2 = 0; k2 < f2.rows(); ++k2)
            load.segment(k2 * k01, k01) += f2(k2, s) * y.col(cols);
        }
      }
    }
  };

  // Same for unstructured nodes, evaluating the test functions directly.
  const auto accumulate_points = [&](const PointRule& r, double sign) {
    constexpr std::size_t kBatch = 512;
    std::array<std::array<std::vector<double>, 3>, kMaxDim> g;
    for (std::size_t first = 0; first < r.nodes.size(); first += kBatch) {
      const std::size_t count = std::min(kBatch, r.nodes.size() - first);
      const std::span<const Vec> nodes(r.nodes.data() + first, count);
      const MatrixXd values =
          weighted_values(nodes, [&](std::size_t q) { return sign * r.weights[first + q]; });
      MatrixXd adj(k_n, static_cast<Index>(count));
      MatrixXd plain(k_n, static_cast<Index>(count));
      for (std::size_t q = 0; q < count; ++q) {
        for (int axis = 0; axis < kMaxDim; ++axis)
          for (int order = 0; order <= 2; ++order) {
            auto& v = g[axis][order];
            v.assign(static_cast<std::size_t>(counts[axis]), 1.0);
            if (axis >= dim) continue;
            for (int k = 1; k <= counts[axis]; ++k)
              v[k - 1] = windowed_sine(proto.window(axis), k, nodes[q][axis], order);
          }
        Index k = 0;
        for (int k2 = 0; k2 < counts[2]; ++k2)
          for (int k1 = 0; k1 < counts[1]; ++k1)
            for (int k0 = 0; k0 < counts[0]; ++k0, ++k) {
              double a = 0.0;
              for (const auto& term : adjoint) {
                const double t = term.coefficient * g[0][term.alpha[0]][k0] *
                                 g[1][term.alpha[1]][k1] * g[2][term.alpha[2]][k2];
                a += magnitude ? std::abs(t) : t;
              }
              adj(k, static_cast<Index>(q)) = a;
              const double v = g[0][0][k0] * g[1][0][k1] * g[2][0][k2];
              plain(k, static_cast<Index>(q)) = magnitude ? std::abs(v) : v;
            }
      }
      block.noalias() += adj * values.leftCols(cols);
      load.noalias() += plain * values.col(cols);
    }
  };

  if (hole_quadrature == HoleQuadrature::mask) {
    accumulate_tensor(rule, 1.0, true);
    return out;
  }

  // Whole box minus the exclusions, plus the boundary terms on them.
  accumulate_tensor(rule, 1.0, false);
  const MultiIndex orders{rule.axis_size(0), rule.axis_size(1), rule.axis_size(2)};
  const ExclusionRules holes = exclusion_volume_rules(problem.domain, box, orders);
  for (const auto& hole : holes.boxes) accumulate_tensor(hole, -1.0, false);
  if (!holes.disks.nodes.empty()) accumulate_points(holes.disks, -1.0);

  // Integration by parts leaves boundary terms on exclusion boundaries,
  // where the test functions do not vanish.
  const auto bnodes = exclusion_boundary_rule(problem.domain, box, orders);
  constexpr std::size_t kBatch = 256;
  std::vector<double> phi_b(static_cast<std::size_t>(cols));
  for (std::size_t first = 0; first < bnodes.size(); first += kBatch) {
    const std::size_t count = std::min(kBatch, bnodes.size() - first);
    MatrixXd test_side(k_n, static_cast<Index>(4 * count));
    MatrixXd feature_side = MatrixXd::Zero(static_cast<Index>(4 * count), cols);
    for (std::size_t i = 0; i < count; ++i) {
      const auto& node = bnodes[first + i];
      Eigen::Matrix4d c = boundary_coupling(problem.op, node.normal) * node.weight;
      if (magnitude) c = c.cwiseAbs();
      const auto col = static_cast<Index>(4 * i);
      for (Index k = 0; k < k_n; ++k) {
        const auto& tf = family[static_cast<std::size_t>(k)];
        Eigen::RowVector4d t = Eigen::RowVector4d::Zero();
        t(0) = tf.eval(node.x);
        for (int axis = 0; axis < dim; ++axis) {
          MultiIndex e{};
          e[axis] = 1;
          t(1 + axis) = tf.eval(node.x, e);
        }
        if (magnitude) t = t.cwiseAbs();
        test_side.block(k, col, 1, 4) = t * c;
      }
      source.eval(node.x, {}, phi_b);
      for (Index j = 0; j < cols; ++j) feature_side(col, j) = phi_b[j];
      for (int axis = 0; axis < dim; ++axis) {
        MultiIndex e{};
        e[axis] = 1;
        source.eval(node.x, e, phi_b);
        for (Index j = 0; j < cols; ++j) feature_side(col + 1 + axis, j) = phi_b[j];
      }
    }
    out.boundary.noalias() += test_side * mag(feature_side);
  }
  return out;
}

void check_weak_inputs(const Decomposition& dec, const TestSet& tests,
                       std::span<const TensorRule> rules) {
  const int num_sub = dec.size();
  if (tests.num_subdomains() != num_sub || static_cast<int>(rules.size()) != num_sub)
    throw InvalidArgument("weak assembly: one test family and rule per subdomain");
  for (int n = 0; n < num_sub; ++n) {
    for (const auto& tf : tests.functions(n))
      if (tf.subdomain() != n) throw InternalError("test function assigned to wrong subdomain");
    const auto& box = rules[static_cast<std::size_t>(n)].box();
    if (!(box.lo == dec.subdomains[n].box.lo && box.hi == dec.subdomains[n].box.hi))
      throw InternalError("quadrature rule does not match subdomain box");
  }
}

}  // namespace

std::string_view to_string(RowCategory c) {
  switch (c) {
    case RowCategory::weak: return "weak";
    case RowCategory::strong: return "strong";
    case RowCategory::boundary: return "boundary";
    case RowCategory::interface_value: return "interface_value";
    case RowCategory::interface_deriv: return "interface_deriv";
  }
  return "?";
}

std::size_t AssembledSystem::count(RowCategory c) const {
  return static_cast<std::size_t>(
      std::count_if(tags.begin(), tags.end(), [c](const RowTag& t) { return t.category == c; }));
}

MatrixXd contract_tensor(const MatrixXd& values, const std::array<MatrixXd, kMaxDim>& factors) {
  const Index q0 = factors[0].cols(), q1 = factors[1].cols(), q2 = factors[2].cols();
  const Index k0 = factors[0].rows(), k1 = factors[1].rows(), k2 = factors[2].rows();
  const Index c = values.cols();
  if (values.rows() != q0 * q1 * q2) throw InternalError("contract_tensor: shape mismatch");

  // Mode 0: (Q0) x (Q1 Q2 C) -> (K0) x (Q1 Q2 C).
  Eigen::Map<const MatrixXd> v0(values.data(), q0, q1 * q2 * c);
  MatrixXd y0 = factors[0] * v0;

  // Mode 1: slices of K0 x Q1.
  MatrixXd y1(k0 * k1, q2 * c);
  const MatrixXd f1t = factors[1].transpose();
  for (Index s = 0; s < q2 * c; ++s) {
    Eigen::Map<const MatrixXd> in(y0.data() + s * k0 * q1, k0, q1);
    Eigen::Map<MatrixXd> out(y1.data() + s * k0 * k1, k0, k1);
    out.noalias() = in * f1t;
  }

  // Mode 2: slices of (K0 K1) x Q2.
  MatrixXd y2(k0 * k1 * k2, c);
  const MatrixXd f2t = factors[2].transpose();
  for (Index s = 0; s < c; ++s) {
    Eigen::Map<const MatrixXd> in(y1.data() + s * k0 * k1 * q2, k0 * k1, q2);
    Eigen::Map<MatrixXd> out(y2.data() + s * k0 * k1 * k2, k0 * k1, k2);
    out.noalias() = in * f2t;
  }
  return y2;
}

AssembledSystem assemble_weak(const ProblemSpec& problem, const Decomposition& dec,
                              std::span<const SubdomainBasis> bases, const TestSet& tests,
                              std::span<const TensorRule> rules,
                              std::span<const int> boundary_partitions,
                              std::span<const int> interface_partitions,
                              HoleQuadrature hole_quadrature) {
  const int num_sub = dec.size();
  if (static_cast<int>(bases.size()) != num_sub)
    throw InvalidArgument("assemble_weak: one basis per subdomain");
  check_weak_inputs(dec, tests, rules);
  for (const auto& b : bases)
    if (b.pou().kind != PouKind::psi_a)
      throw UnsupportedConfiguration(
          "the weak pipeline requires the non-overlapping partition of unity psi_a");

  AssembledSystem sys;
  sys.column_offsets = column_offsets(bases);
  const int num_cols = sys.column_offsets.back();

  const auto boundary = subdomain_boundary_points(problem.domain, dec, boundary_partitions);
  std::vector<OwnedBoundaryPoint> applied;
  for (const auto& bp : boundary)
    if (problem.applies(bp.tag)) applied.push_back(bp);
  const auto iface = interface_points(dec, interface_partitions);

  const Index weak_rows = tests.total();
  const Index total_rows = weak_rows + static_cast<Index>(applied.size() + iface.size());
  sys.matrix = MatrixXd::Zero(total_rows, num_cols);
  sys.rhs = Eigen::VectorXd::Zero(total_rows);
  sys.tags.resize(total_rows);

  Index row = 0;
  for (int n = 0; n < num_sub; ++n) {
    const auto& basis = bases[n];
    const auto& family = tests.functions(n);
    if (family.empty()) continue;
    const ColumnSource source{
        basis.size(), [&](std::span<const Vec> nodes) { return basis.eval_matrix(nodes); },
        [&](const Vec& x, const MultiIndex& d, std::span<double> out) {
          basis.eval_all(x, d, out);
        }};
    const WeakBlock wb = weak_block(problem, dec.subdomains[n].box, family, tests.counts(n),
                                    rules[n], hole_quadrature, source);
    const Index k_n = static_cast<Index>(family.size());
    sys.matrix.block(row, sys.column_offsets[n], k_n, basis.size()) = wb.volume + wb.boundary;
    sys.rhs.segment(row, k_n) = wb.load;
    for (Index i = 0; i < k_n; ++i) {
      auto& tag = sys.tags[row + i];
      tag.category = RowCategory::weak;
      tag.subdomain = n;
      tag.index = family[static_cast<std::size_t>(i)].frequencies();
    }
    row += k_n;
  }

  std::vector<double> phi;
  for (const auto& bp : applied) {
    const auto& basis = bases[bp.owner];
    phi.resize(basis.size());
    basis.eval_all(bp.x, {}, phi);
    for (int j = 0; j < basis.size(); ++j) sys.matrix(row, sys.column(bp.owner, j)) = phi[j];
    sys.rhs(row) = problem.dirichlet(bp.x, bp.tag);
    sys.tags[row] = RowTag{RowCategory::boundary, bp.owner, -1, {}, bp.x};
    ++row;
  }

  for (const auto& ip : iface) {
    const auto& left = bases[ip.left];
    const auto& right = bases[ip.right];
    phi.resize(left.size());
    left.eval_all(ip.x, {}, phi);
    for (int j = 0; j < left.size(); ++j) sys.matrix(row, sys.column(ip.left, j)) = -phi[j];
    phi.resize(right.size());
    right.eval_all(ip.x, {}, phi);
    for (int j = 0; j < right.size(); ++j) sys.matrix(row, sys.column(ip.right, j)) = phi[j];
    sys.tags[row] = RowTag{RowCategory::interface_value, ip.left, ip.right, {}, ip.x};
    ++row;
  }
  return sys;
}

WeakResidual weak_residual(const ProblemSpec& problem, const Decomposition& dec,
                           const TestSet& tests, std::span<const TensorRule> rules,
                           const ScalarField& u, const VectorField& grad_u,
                           HoleQuadrature hole_quadrature) {
  check_weak_inputs(dec, tests, rules);
  const ColumnSource source{
      1,
      [&](std::span<const Vec> nodes) {
        MatrixXd v(static_cast<Index>(nodes.size()), 1);
        for (std::size_t q = 0; q < nodes.size(); ++q) v(static_cast<Index>(q), 0) = u(nodes[q]);
        return v;
      },
      [&](const Vec& x, const MultiIndex& d, std::span<double> out) {
        const int order = total_order(d);
        if (order == 0) {
          out[0] = u(x);
          return;
        }
        if (order > 1) throw UnsupportedOrder("weak_residual needs first derivatives only");
        const Vec g = grad_u(x);
        for (int i = 0; i < kMaxDim; ++i)
          if (d[i] == 1) out[0] = g[i];
      }};

  WeakResidual r;
  r.residual = Eigen::VectorXd::Zero(tests.total());
  r.scale = Eigen::VectorXd::Zero(tests.total());
  Index row = 0;
  for (int n = 0; n < dec.size(); ++n) {
    const auto& family = tests.functions(n);
    if (family.empty()) continue;
    const WeakBlock wb = weak_block(problem, dec.subdomains[n].box, family, tests.counts(n),
                                    rules[n], hole_quadrature, source);
    const WeakBlock abs = weak_block(problem, dec.subdomains[n].box, family, tests.counts(n),
                                     rules[n], hole_quadrature, source, true);
    for (Index i = 0; i < wb.load.size(); ++i, ++row) {
      r.residual(row) = wb.volume(i, 0) + wb.boundary(i, 0) - wb.load(i);
      r.scale(row) = abs.volume(i, 0) + abs.boundary(i, 0) + abs.load(i);
      r.tags.push_back(RowTag{RowCategory::weak, n, -1,
                              family[static_cast<std::size_t>(i)].frequencies(), {}});
    }
  }
  return r;
}

AssembledSystem assemble_strong(const ProblemSpec& problem, const Decomposition& dec,
                                std::span<const SubdomainBasis> bases,
                                std::span<const std::vector<Vec>> interior,
                                std::span<const OwnedBoundaryPoint> boundary,
                                std::span<const InterfacePoint> interfaces) {
  const int num_sub = dec.size();
  if (static_cast<int>(bases.size()) != num_sub || static_cast<int>(interior.size()) != num_sub)
    throw InvalidArgument("assemble_strong: one basis and one point set per subdomain");
  const bool blocky = bases.front().pou().kind == PouKind::psi_a;

  AssembledSystem sys;
  sys.column_offsets = column_offsets(bases);
  const int num_cols = sys.column_offsets.back();

  Index num_interior = 0;
  for (const auto& pts : interior) num_interior += static_cast<Index>(pts.size());
  Index num_boundary = 0;
  for (const auto& bp : boundary)
    if (problem.applies(bp.tag)) ++num_boundary;
  const Index num_iface = blocky ? 2 * static_cast<Index>(interfaces.size()) : 0;
  const Index total_rows = num_interior + num_boundary + num_iface;
  sys.matrix = MatrixXd::Zero(total_rows, num_cols);
  sys.rhs = Eigen::VectorXd::Zero(total_rows);
  sys.tags.resize(total_rows);

  std::vector<double> buf;
  // Adds sum_terms a * d^alpha (psi_m phi_mj)(x) of every block m touching x.
  const auto add_operator_row = [&](Index row, const Vec& x, int home) {
    for (int m = 0; m < num_sub; ++m) {
      if (blocky && m != home) continue;
      const auto& basis = bases[m];
      buf.resize(basis.size());
      for (const auto& term : problem.op.terms()) {
        if (blocky)
          basis.eval_all(x, term.alpha, buf);
        else
          blended_derivative(basis, x, term.alpha, buf);
        for (int j = 0; j < basis.size(); ++j)
          sys.matrix(row, sys.column(m, j)) += term.coefficient * buf[j];
      }
    }
  };
  const auto add_value_row = [&](Index row, const Vec& x, int home) {
    for (int m = 0; m < num_sub; ++m) {
      if (blocky && m != home) continue;
      const auto& basis = bases[m];
      const double psi = blocky ? 1.0 : basis.pou_at(x);
      if (psi == 0.0) continue;
      buf.resize(basis.size());
      basis.eval_all(x, {}, buf);
      for (int j = 0; j < basis.size(); ++j) sys.matrix(row, sys.column(m, j)) += psi * buf[j];
    }
  };

  Index row = 0;
  for (int n = 0; n < num_sub; ++n) {
    for (const auto& x : interior[n]) {
      add_operator_row(row, x, n);
      sys.rhs(row) = problem.source(x);
      sys.tags[row] = RowTag{RowCategory::strong, n, -1, {}, x};
      ++row;
    }
  }
  for (const auto& bp : boundary) {
    if (!problem.applies(bp.tag)) continue;
    add_value_row(row, bp.x, bp.owner);
    sys.rhs(row) = problem.dirichlet(bp.x, bp.tag);
    sys.tags[row] = RowTag{RowCategory::boundary, bp.owner, -1, {}, bp.x};
    ++row;
  }
  if (blocky) {
    for (const auto& ip : interfaces) {
      for (int order = 0; order <= 1; ++order) {
        MultiIndex d{};
        d[ip.axis] = order;
        const auto& left = bases[ip.left];
        const auto& right = bases[ip.right];
        buf.resize(left.size());
        left.eval_all(ip.x, d, buf);
        for (int j = 0; j < left.size(); ++j) sys.matrix(row, sys.column(ip.left, j)) = -buf[j];
        buf.resize(right.size());
        right.eval_all(ip.x, d, buf);
        for (int j = 0; j < right.size(); ++j) sys.matrix(row, sys.column(ip.right, j)) = buf[j];
        sys.tags[row] = RowTag{order == 0 ? RowCategory::interface_value
                                          : RowCategory::interface_deriv,
                               ip.left, ip.right, {}, ip.x};
        ++row;
      }
    }
  }
  return sys;
}

HoleQuadrature parse_hole_quadrature(std::string_view name) {
  if (name == "subtract") return HoleQuadrature::subtract;
  if (name == "mask") return HoleQuadrature::mask;
  throw InvalidArgument("unknown hole quadrature '" + std::string(name) + "'");
}

std::string_view to_string(HoleQuadrature h) {
  return h == HoleQuadrature::subtract ? "subtract" : "mask";
}

RescaleMode parse_rescale(std::string_view name) {
  if (name == "none") return RescaleMode::none;
  if (name == "max_abs") return RescaleMode::max_abs;
  throw InvalidArgument("unknown rescale mode '" + std::string(name) + "'");
}

std::string_view to_string(RescaleMode m) { return m == RescaleMode::none ? "none" : "max_abs"; }

AssembledSystem rescale_rows(AssembledSystem system, RescaleMode mode, RescaleReport* report) {
  if (mode == RescaleMode::none) return system;
  for (Index r = 0; r < system.rows(); ++r) {
    const double scale = system.matrix.row(r).cwiseAbs().maxCoeff();
    if (scale == 0.0) {
      if (report != nullptr) report->zero_rows.push_back(r);
      continue;
    }
    system.matrix.row(r) /= scale;
    system.rhs(r) /= scale;
  }
  return system;
}

void apply_category_weights(AssembledSystem& system, const CategoryWeights& weights) {
  for (Index r = 0; r < system.rows(); ++r) {
    double w = weights.weak;
    switch (system.tags[static_cast<std::size_t>(r)].category) {
      case RowCategory::weak:
      case RowCategory::strong: w = weights.weak; break;
      case RowCategory::boundary: w = weights.boundary; break;
      case RowCategory::interface_value:
      case RowCategory::interface_deriv: w = weights.interface; break;
    }
    if (w != 1.0) {
      system.matrix.row(r) *= w;
      system.rhs(r) *= w;
    }
  }
}

void write_system(const AssembledSystem& system, std::ostream& out) {
  out.write("WRFM", 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(system.rows()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(system.cols()));
  put<std::uint32_t>(out, 0);
  for (Index r = 0; r < system.rows(); ++r)
    for (Index c = 0; c < system.cols(); ++c) put<double>(out, system.matrix(r, c));
  for (Index r = 0; r < system.rows(); ++r) put<double>(out, system.rhs(r));
  for (const auto& tag : system.tags) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tag.category));
    put<std::int32_t>(out, tag.subdomain);
    put<std::int32_t>(out, tag.other);
  }
}

AssembledSystem read_system(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "WRFM", 4) != 0) throw InvalidInput("not a WRFM system dump");
  const auto rows = get<std::uint32_t>(in);
  const auto cols = get<std::uint32_t>(in);
  (void)get<std::uint32_t>(in);
  AssembledSystem sys;
  sys.matrix.resize(rows, cols);
  sys.rhs.resize(rows);
  sys.tags.resize(rows);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) sys.matrix(r, c) = get<double>(in);
  for (Index r = 0; r < rows; ++r) sys.rhs(r) = get<double>(in);
  for (auto& tag : sys.tags) {
    const auto cat = get<std::uint32_t>(in);
    if (cat > static_cast<std::uint32_t>(RowCategory::interface_deriv))
      throw InvalidInput("bad row category in system dump");
    tag.category = static_cast<RowCategory>(cat);
    tag.subdomain = get<std::int32_t>(in);
    tag.other = get<std::int32_t>(in);
  }
  return sys;
}

}  // namespace wrfm
