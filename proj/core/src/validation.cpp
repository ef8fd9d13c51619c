#include "wrfm/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "wrfm/errors.hpp"
#include "wrfm/quadrature.hpp"

namespace wrfm {

namespace {

constexpr double kPi = std::numbers::pi;
using Clock = std::chrono::steady_clock;

AxisBox make_box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  return AxisBox::make(std::span<const double>(lo.begin(), lo.size()),
                       std::span<const double>(hi.begin(), hi.size()));
}

Vec random_point(std::mt19937_64& rng, const AxisBox& box, double margin = 0.0) {
  Vec x{};
  for (int i = 0; i < box.dim; ++i) {
    const double w = box.hi[i] - box.lo[i];
    std::uniform_real_distribution<double> u(box.lo[i] + margin * w, box.hi[i] - margin * w);
    x[i] = u(rng);
  }
  return x;
}

std::vector<MultiIndex> derivatives_up_to_two(int dim) {
  std::vector<MultiIndex> out;
  for (int i = 0; i < dim; ++i) {
    MultiIndex a{};
    a[i] = 1;
    out.push_back(a);
  }
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      MultiIndex a{};
      ++a[i];
      ++a[j];
      out.push_back(a);
    }
  return out;
}

/// Tracks max |analytic - fd| / max |analytic| per derivative.
struct DerivativeCheck {
  double worst = 0.0;
  std::string where;

  void add(const std::string& label, const std::vector<double>& exact,
           const std::vector<double>& approx) {
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      err = std::max(err, std::abs(exact[i] - approx[i]));
      scale = std::max(scale, std::abs(exact[i]));
    }
    const double rel = scale > 0.0 ? err / scale : err;
    if (rel > worst) {
      worst = rel;
      where = label;
    }
  }
};

std::string alpha_label(const MultiIndex& a) {
  return "(" + std::to_string(a[0]) + "," + std::to_string(a[1]) + "," + std::to_string(a[2]) +
         ")";
}

/// psi_b is only C1: its second derivative jumps where the blend meets the
/// plateau and where it reaches zero.
bool near_psi_b_break(const Subdomain& sub, const Vec& x, double h) {
  const Vec l = sub.normalize(x);
  for (int i = 0; i < sub.box.dim; ++i)
    for (double b : {0.75, 1.25})
      if (std::abs(std::abs(l[i]) - b) * sub.half_widths[i] < h) return true;
  return false;
}

SuiteResult feature_derivatives(double) {
  SuiteResult r{"feature_derivatives", false, 0.0, 1e-6, {}, 0.0};
  std::mt19937_64 rng(11);
  DerivativeCheck check;
  const AxisBox boxes[] = {make_box({-1.0, 0.0}, {-0.5, 1.0}),
                           make_box({0.0, -1.5, 0.0}, {0.5, 1.5, 0.5})};
  const Activation acts[] = {Activation::tanh, Activation::sin, Activation::cos};
  const PouKind pous[] = {PouKind::psi_b, PouKind::psi_c};
  for (const auto& box : boxes) {
    const Subdomain sub = Subdomain::from_box(0, box);
    const auto alphas = derivatives_up_to_two(box.dim);
    for (Activation act : acts)
      for (PouKind pk : pous) {
        const SubdomainBasis basis = sample_basis(sub, 6, 2.0, 5, act, {pk, 0.05});
        double min_half = box.hi[0] - box.lo[0];
        for (int i = 0; i < box.dim; ++i) min_half = std::min(min_half, sub.half_widths[i]);
        // Steps resolve the fastest scale: features have |k| <= R, psi_c has
        // transitions of width alpha in the normalized coordinate.
        const double h_feature = 1e-2 * min_half / 2.0;
        const double h_pou = 1e-2 * min_half * 0.05;
        for (int j = 0; j < basis.size(); ++j)
          for (const auto& a : alphas) {
            std::vector<double> exact, approx;
            for (int p = 0; p < 20; ++p) {
              const Vec x = random_point(rng, box, 0.05);
              exact.push_back(basis.eval_feature(j, x, a));
              approx.push_back(finite_difference(
                  [&](const Vec& y) { return basis.eval_feature(j, y); }, x, a, h_feature));
            }
            check.add(std::string(to_string(act)) + " feature " + std::to_string(j) + " d" +
                          alpha_label(a),
                      exact, approx);
          }
        for (const auto& a : alphas) {
          std::vector<double> exact, approx;
          for (int p = 0; p < 40;) {
            // Sample across the overlap region beyond the box as well.
            Vec x = random_point(rng, box);
            for (int i = 0; i < box.dim; ++i)
              x[i] = sub.center[i] + 1.3 * (x[i] - sub.center[i]);
            if (pk == PouKind::psi_b && near_psi_b_break(sub, x, 3.0 * h_pou)) continue;
            ++p;
            exact.push_back(basis.pou_at(x, a));
            approx.push_back(
                finite_difference([&](const Vec& y) { return basis.pou_at(y); }, x, a, h_pou));
          }
          check.add(std::string(to_string(pk)) + " d" + alpha_label(a), exact, approx);
        }
      }
  }
  r.worst = check.worst;
  r.detail = "worst at " + check.where;
  r.passed = r.worst < r.tolerance;
  return r;
}

SuiteResult test_function_derivatives(double) {
  SuiteResult r{"test_function_derivatives", false, 0.0, 1e-6, {}, 0.0};
  std::mt19937_64 rng(12);
  DerivativeCheck check;
  const AxisBox boxes[] = {make_box({-1.0, 0.0}, {-0.5, 1.0}),
                           make_box({0.0, -1.5, 0.0}, {0.5, 1.5, 0.5})};
  const WindowShape shapes[] = {{WindowKind::cosine, 0.05}, {WindowKind::sigmoid, 0.05}};
  for (const auto& box : boxes)
    for (const auto& shape : shapes) {
      const auto alphas = derivatives_up_to_two(box.dim);
      for (const MultiIndex& k : {MultiIndex{1, 1, 1}, MultiIndex{7, 3, 5}, MultiIndex{25, 15, 10}}) {
        const TestFunction tf(0, box, k, shape);
        // Fastest scale along any axis: the sine frequency or the window edge.
        double omega = 0.0;
        for (int i = 0; i < box.dim; ++i) {
          const double width = box.hi[i] - box.lo[i];
          double w = kPi * k[i] / width + 2.0 * kPi / width;
          if (shape.kind == WindowKind::sigmoid) w += 2.0 / (shape.alpha * width);
          omega = std::max(omega, w);
        }
        const double h = 2e-2 / omega;
        for (const auto& a : alphas) {
          std::vector<double> exact, approx;
          for (int p = 0; p < 40; ++p) {
            const Vec x = random_point(rng, box);
            exact.push_back(tf.eval(x, a));
            approx.push_back(
                finite_difference([&](const Vec& y) { return tf.eval(y); }, x, a, h));
          }
          check.add(std::string(to_string(shape.kind)) + " k=" + alpha_label(k) + " d" +
                        alpha_label(a),
                    exact, approx);
        }
      }
    }
  r.worst = check.worst;
  r.detail = "worst at " + check.where;
  r.passed = r.worst < r.tolerance;
  return r;
}

SuiteResult adjoint_identity(double weight_scale) {
  SuiteResult r{"adjoint_identity", false, 0.0, 1e-6, {}, 0.0};
  std::string where;
  for (const auto& name : builtin_names()) {
    const ProblemSpec spec = builtin(name);
    const int dim = spec.dim();
    const AxisBox& box = spec.domain.bounding();
    const Subdomain sub = Subdomain::from_box(0, box);
    const SubdomainBasis basis =
        sample_basis(sub, 3, 1.0, 21, Activation::tanh, {PouKind::psi_a, 0.05});
    for (const WindowKind wk : {WindowKind::cosine, WindowKind::sigmoid}) {
      const WindowShape shape{wk, 0.1};
      MultiIndex orders{1, 1, 1};
      for (int i = 0; i < dim; ++i)
        orders[i] = std::max(dim == 3 ? 48 : 96, window_quadrature_order(shape));
      TensorRule rule(box, orders);
      if (weight_scale != 1.0) rule.scale_weights(weight_scale);
      const TestFunction tf(0, box, MultiIndex{3, 4, 2}, shape);
      // Both sides of the identity and their absolute integrals in one pass.
      const int nf = basis.size();
      std::vector<double> a(nf, 0.0), b(nf, 0.0), abs_a(nf, 0.0), abs_b(nf, 0.0);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec& x = rule.nodes()[q];
        const double w = rule.weights()[q];
        const double adj = apply_adjoint(spec.op, tf, x);
        const double psi = tf.eval(x);
        for (int j = 0; j < nf; ++j) {
          double lphi = 0.0;
          for (const auto& t : spec.op.terms())
            lphi += t.coefficient * basis.eval_feature(j, x, t.alpha);
          const double left = basis.eval_feature(j, x) * adj;
          const double right = lphi * psi;
          a[j] += w * left;
          b[j] += w * right;
          abs_a[j] += w * std::abs(left);
          abs_b[j] += w * std::abs(right);
        }
      }
      for (int j = 0; j < nf; ++j) {
        const double rel = std::abs(a[j] - b[j]) / std::max(abs_a[j], abs_b[j]);
        if (rel > r.worst) {
          r.worst = rel;
          where = name + " " + std::string(to_string(wk)) + " feature " + std::to_string(j);
        }
      }
    }
  }
  r.detail = "worst at " + where;
  r.passed = r.worst < r.tolerance;
  return r;
}

SuiteResult quadrature_exactness(double weight_scale) {
  SuiteResult r{"quadrature_exactness", false, 0.0, 1e-12, {}, 0.0};
  std::string where;
  const auto record = [&](double got, double exact, double scale, const std::string& label) {
    const double rel = std::abs(got - exact) / scale;
    if (rel > r.worst) {
      r.worst = rel;
      where = label;
    }
  };
  // One-dimensional rules through the tensor class so the fault hook applies.
  const std::pair<double, double> intervals[] = {{0.0, 1.0}, {-0.3, 1.7}, {-1.0, 1.0}};
  for (int q : {1, 2, 3, 5, 8, 13, 21, 40, 64, 100, 160, 256}) {
    for (const auto& [a, b] : intervals) {
      TensorRule rule(make_box({a}, {b}), MultiIndex{q, 1, 1});
      if (weight_scale != 1.0) rule.scale_weights(weight_scale);
      for (int p = 0; p <= 2 * q - 1; p += std::max(1, (2 * q - 1) / 12)) {
        const double got = integrate([p](const Vec& x) { return std::pow(x[0], p); }, rule);
        const double exact = (std::pow(b, p + 1) - std::pow(a, p + 1)) / (p + 1);
        // Scale by the integral of |x|^p so cancelling odd powers stay relative.
        const double scale =
            (std::pow(std::abs(b), p + 1) + std::pow(std::abs(a), p + 1)) / (p + 1);
        record(got, exact, scale,
               "Q=" + std::to_string(q) + " x^" + std::to_string(p) + " on [" +
                   std::to_string(a) + "," + std::to_string(b) + "]");
      }
    }
  }
  // Tensor rules: monomials of per-axis degree up to 2Q-1.
  const MultiIndex orders{4, 6, 5};
  TensorRule rule(make_box({0.0, -1.0, 0.5}, {1.0, 2.0, 1.5}), orders);
  if (weight_scale != 1.0) rule.scale_weights(weight_scale);
  for (int p0 = 0; p0 < 2 * orders[0]; ++p0)
    for (int p1 = 0; p1 < 2 * orders[1]; p1 += 3)
      for (int p2 = 0; p2 < 2 * orders[2]; p2 += 2) {
        const auto f = [&](const Vec& x) {
          return std::pow(x[0], p0) * std::pow(x[1], p1) * std::pow(x[2], p2);
        };
        const auto axis_integral = [&](double a, double b, int p) {
          return (std::pow(b, p + 1) - std::pow(a, p + 1)) / (p + 1);
        };
        const auto axis_abs = [&](double a, double b, int p) {
          return (std::pow(std::abs(b), p + 1) + std::pow(std::abs(a), p + 1)) / (p + 1);
        };
        const double exact = axis_integral(0.0, 1.0, p0) * axis_integral(-1.0, 2.0, p1) *
                             axis_integral(0.5, 1.5, p2);
        const double scale =
            axis_abs(0.0, 1.0, p0) * axis_abs(-1.0, 2.0, p1) * axis_abs(0.5, 1.5, p2);
        record(integrate(f, rule), exact, scale,
               "tensor x^" + std::to_string(p0) + " y^" + std::to_string(p1) + " z^" +
                   std::to_string(p2));
      }
  // Smooth non-polynomial integrand.
  {
    TensorRule sine(make_box({0.0}, {kPi}), MultiIndex{16, 1, 1});
    if (weight_scale != 1.0) sine.scale_weights(weight_scale);
    record(integrate([](const Vec& x) { return std::sin(x[0]); }, sine), 2.0, 2.0,
           "sin on [0,pi] Q=16");
  }
  r.detail = "worst at " + where;
  r.passed = r.worst < r.tolerance;
  return r;
}

SuiteResult masked_area(double weight_scale) {
  SuiteResult r{"masked_area", true, 0.0, 1.0, {}, 0.0};
  std::ostringstream detail;
  double worst_ratio = 0.0;
  const auto check = [&](const std::string& label, double got, double exact, double tol) {
    const double err = std::abs(got - exact);
    worst_ratio = std::max(worst_ratio, err / tol);
    if (!(err < tol)) r.passed = false;
    detail << label << " err " << err << " (tol " << tol << "); ";
  };
  const auto one = [](const Vec&) { return 1.0; };

  // Eight disks, node masking at Q = 100.
  {
    const Domain domain(make_box({-2.0, 0.0}, {1.0, 1.0}), hex_disk_layout());
    TensorRule rule(domain.bounding(), MultiIndex{100, 100, 1}, &domain);
    if (weight_scale != 1.0) rule.scale_weights(weight_scale);
    check("disks masked", integrate(one, rule), 3.0 - 8.0 * kPi * 0.05 * 0.05, 2e-3);

    // Box rule minus the polar rules used by the subtract mode.
    TensorRule whole(domain.bounding(), MultiIndex{40, 40, 1});
    if (weight_scale != 1.0) whole.scale_weights(weight_scale);
    const ExclusionRules holes =
        exclusion_volume_rules(domain, domain.bounding(), MultiIndex{40, 40, 1});
    double removed = 0.0;
    for (double w : holes.disks.weights) removed += w * weight_scale;
    check("disks subtracted", integrate(one, whole) - removed, 3.0 - 8.0 * kPi * 0.05 * 0.05,
          1e-12);
  }

  // Centred square hole: 3x3 subdomain rules, so no node lies near the hole.
  {
    const AxisBox unit = make_box({0.0, 0.0}, {1.0, 1.0});
    const Domain domain(unit, {make_box({1.0 / 3.0, 1.0 / 3.0}, {2.0 / 3.0, 2.0 / 3.0})});
    const int counts[] = {3, 3};
    const Decomposition dec = decompose(unit, counts);
    double total = 0.0;
    for (const auto& sub : dec.subdomains) {
      TensorRule rule(sub.box, MultiIndex{7, 7, 1}, &domain);
      if (weight_scale != 1.0) rule.scale_weights(weight_scale);
      total += integrate(one, rule);
    }
    check("square hole masked", total, 8.0 / 9.0, 1e-12);
  }

  // Adding an exclusion never increases the integral of a nonnegative field.
  {
    const AxisBox box = make_box({-2.0, 0.0}, {1.0, 1.0});
    const auto f = [](const Vec& x) { return 1.0 + x[0] * x[0] * x[1]; };
    std::vector<Exclusion> holes;
    double previous = 0.0;
    bool monotone = true;
    for (std::size_t k = 0; k <= hex_disk_layout().size(); ++k) {
      if (k > 0) holes.push_back(hex_disk_layout()[k - 1]);
      const Domain domain(box, holes);
      TensorRule rule(box, MultiIndex{60, 60, 1}, &domain);
      if (weight_scale != 1.0) rule.scale_weights(weight_scale);
      const double v = integrate(f, rule);
      if (k > 0 && v > previous) monotone = false;
      previous = v;
    }
    if (!monotone) r.passed = false;
    detail << "monotone " << (monotone ? "yes" : "no");
  }
  r.worst = worst_ratio;
  r.detail = detail.str();
  return r;
}

double distance_to_kinks(const std::string& name, const Vec& x) {
  if (name == "helmholtz2d_regular" || name == "helmholtz2d_complex") return std::abs(x[0]);
  if (name == "poisson3d") return std::abs(x[0] - 0.5);
  if (name == "heat3d") return std::min(std::abs(x[0]), std::abs(x[1]));
  if (name == "static_heat2d")
    return std::min(std::abs(x[0] - x[1]), std::abs(x[0] + x[1] - 1.0)) / std::sqrt(2.0);
  return 1.0;
}

SuiteResult reference_solutions(double) {
  SuiteResult r{"reference_solutions", false, 0.0, 1e-4, {}, 0.0};
  std::mt19937_64 rng(13);
  std::string where;
  double worst_boundary = 0.0;
  for (const auto& name : builtin_names()) {
    const ProblemSpec spec = builtin(name);
    const auto& u = *spec.reference;
    int accepted = 0;
    while (accepted < 100) {
      const Vec x = random_point(rng, spec.domain.bounding(), 0.01);
      if (!spec.domain.contains(x) || distance_to_kinks(name, x) < 0.05) continue;
      // Second-order central differences with h = 1e-4, no extrapolation.
      double lu = 0.0;
      for (const auto& t : spec.op.terms()) {
        const double d = total_order(t.alpha) == 0 ? u(x) : finite_difference(u, x, t.alpha, -1e-4);
        lu += t.coefficient * d;
      }
      const double f = spec.source(x);
      const double rel = std::abs(lu - f) / std::max(1.0, std::abs(f));
      if (rel > r.worst) {
        r.worst = rel;
        where = name;
      }
      ++accepted;
    }
    const int parts[] = {13, 17, 11};
    for (const auto& bp : boundary_points(spec.domain, std::span<const int>(parts, spec.dim()),
                                          BoundarySelect::all)) {
      if (!spec.applies(bp.tag)) continue;
      worst_boundary = std::max(worst_boundary, std::abs(u(bp.x) - spec.dirichlet(bp.x, bp.tag)));
    }
  }
  r.detail = "pde residual worst at " + where + "; boundary mismatch " +
             std::to_string(worst_boundary);
  r.passed = r.worst < r.tolerance && worst_boundary < 1e-10;
  return r;
}

/// |a - b| / |b| over the 2D metric grid points inside the domain.
double relative_distance(const GlobalModel& a, const GlobalModel& b, const ProblemSpec& spec,
                         const MultiIndex& grid) {
  double num = 0.0, den = 0.0;
  const AxisBox& box = spec.domain.bounding();
  for (int j = 0; j < grid[1]; ++j)
    for (int i = 0; i < grid[0]; ++i) {
      const Vec x{box.lo[0] + (box.hi[0] - box.lo[0]) * i / (grid[0] - 1),
                  box.lo[1] + (box.hi[1] - box.lo[1]) * j / (grid[1] - 1), 0.0};
      if (!spec.domain.contains(x)) continue;
      const double d = a.eval(x) - b.eval(x);
      num += d * d;
      den += b.eval(x) * b.eval(x);
    }
  return std::sqrt(num / den);
}

SuiteResult manufactured_solves(double) {
  SuiteResult r{"manufactured_solves", false, 0.0, 1e-4, {}, 0.0};
  const ProblemSpec spec = builtin("manufactured_poisson2d");
  const MultiIndex grid = spec.defaults.metric_grid;
  SolverConfig weak;
  weak.pipeline = Pipeline::weak;
  SolverConfig strong = weak;
  strong.pipeline = Pipeline::strong;
  const SolveResult ws = solve_problem(spec, weak);
  const SolveResult ss = solve_problem(spec, strong);
  const double lw = metrics(ws.model, spec, grid).l2;
  const double ls = metrics(ss.model, spec, grid).l2;
  const double agree = relative_distance(ws.model, ss.model, spec, grid);

  ProblemParameters holes;
  holes.exclusions = std::vector<Exclusion>{Disk{0.7, 0.3, 0.1},
                                            make_box({0.3, 0.4}, {0.55, 0.7})};
  const ProblemSpec holed = builtin("manufactured_poisson2d", holes);
  const double lh = metrics(solve_problem(holed, weak).model, holed, grid).l2;

  r.worst = std::max({lw, ls, lh});
  std::ostringstream d;
  d << "weak " << lw << ", strong " << ls << ", weak with exclusions " << lh
    << ", weak-strong distance " << agree << " (tol 1e-3)";
  r.detail = d.str();
  r.passed = r.worst < r.tolerance && agree < 1e-3;
  return r;
}

SuiteResult static_heat_weak_residual(double weight_scale) {
  SuiteResult r{"static_heat_weak_residual", false, 0.0, 1e-4, {}, 0.0};
  const WeakResidualSummary s = reference_weak_residual(builtin("static_heat2d"),
                                                        static_heat_gradient, r.tolerance,
                                                        weight_scale);
  r.worst = s.worst;
  r.detail = std::to_string(s.failing_rows) + " of " + std::to_string(s.rows) +
             " rows above tolerance";
  r.passed = s.failing_rows == 0;
  return r;
}

using SuiteFn = SuiteResult (*)(double);

const std::vector<std::pair<std::string, SuiteFn>>& suites() {
  static const std::vector<std::pair<std::string, SuiteFn>> list = {
      {"feature_derivatives", feature_derivatives},
      {"test_function_derivatives", test_function_derivatives},
      {"adjoint_identity", adjoint_identity},
      {"quadrature_exactness", quadrature_exactness},
      {"masked_area", masked_area},
      {"reference_solutions", reference_solutions},
      {"manufactured_solves", manufactured_solves},
      {"static_heat_weak_residual", static_heat_weak_residual},
  };
  return list;
}

}  // namespace

double finite_difference(const std::function<double(const Vec&)>& f, const Vec& x,
                         const MultiIndex& deriv, double h) {
  int axes[2] = {-1, -1};
  int found = 0;
  for (int i = 0; i < kMaxDim; ++i)
    for (int p = 0; p < deriv[i]; ++p) {
      if (found == 2) throw UnsupportedOrder("finite_difference supports order <= 2");
      axes[found++] = i;
    }
  if (found == 0) return f(x);
  const auto central = [&](double s) {
    const auto shifted = [&](double a, double b) {
      Vec y = x;
      y[axes[0]] += a;
      if (found == 2) y[axes[1]] += b;
      return f(y);
    };
    if (found == 1) return (shifted(s, 0.0) - shifted(-s, 0.0)) / (2.0 * s);
    if (axes[0] == axes[1]) {
      Vec yp = x, ym = x;
      yp[axes[0]] += s;
      ym[axes[0]] -= s;
      return (f(yp) - 2.0 * f(x) + f(ym)) / (s * s);
    }
    return (shifted(s, s) - shifted(s, -s) - shifted(-s, s) + shifted(-s, -s)) / (4.0 * s * s);
  };
  // A negative step asks for the plain second-order stencil.
  if (h < 0.0) return central(-h);
  return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

Vec static_heat_gradient(const Vec& p) {
  const double x = p[0], y = p[1];
  if ((x - y) * (y + x - 1.0) > 0.0) return Vec{4.5 * (2.0 * x - 1.0), 0.0, 0.0};
  return Vec{0.0, 4.5 * (1.0 - 2.0 * y), 0.0};
}

WeakResidualSummary reference_weak_residual(const ProblemSpec& problem,
                                            const VectorField& gradient, double tolerance,
                                            double weight_scale) {
  if (!problem.reference) throw UnsupportedConfiguration("problem has no reference solution");
  const SolverConfig c = SolverConfig{}.resolved(problem);
  const int dim = problem.dim();
  const Decomposition dec =
      decompose(problem.domain.bounding(), std::span<const int>(c.subdomains.data(), dim));
  const MultiIndex counts = c.tests;
  const TestSet tests = build_test_set(dec, std::span<const MultiIndex>(&counts, 1), c.window);
  const Domain* mask = c.hole_quadrature == HoleQuadrature::mask ? &problem.domain : nullptr;
  std::vector<TensorRule> rules;
  for (const auto& sub : dec.subdomains) {
    rules.emplace_back(sub.box, c.quadrature_order, mask);
    if (weight_scale != 1.0) rules.back().scale_weights(weight_scale);
  }
  const WeakResidual res =
      weak_residual(problem, dec, tests, rules, *problem.reference, gradient, c.hole_quadrature);
  WeakResidualSummary s;
  s.rows = static_cast<int>(res.residual.size());
  for (Eigen::Index i = 0; i < res.residual.size(); ++i) {
    const double rel = res.scale(i) > 0.0 ? std::abs(res.residual(i)) / res.scale(i) : 0.0;
    s.worst = std::max(s.worst, rel);
    if (!(rel < tolerance)) ++s.failing_rows;
  }
  return s;
}

std::vector<std::string> validation_suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : suites()) names.push_back(name);
  names.push_back("runtime");
  return names;
}

std::vector<SuiteResult> run_validation(const ValidationOptions& options) {
  for (const auto& s : options.suites) {
    const auto names = validation_suite_names();
    if (std::find(names.begin(), names.end(), s) == names.end())
      throw InvalidArgument("unknown validation suite '" + s + "'");
  }
  const auto selected = [&](const std::string& name) {
    return options.suites.empty() ||
           std::find(options.suites.begin(), options.suites.end(), name) != options.suites.end();
  };
  std::vector<SuiteResult> results;
  const auto t0 = Clock::now();
  for (const auto& [name, fn] : suites()) {
    if (!selected(name)) continue;
    const auto t = Clock::now();
    SuiteResult r;
    try {
      r = fn(options.quadrature_weight_scale);
    } catch (const Error& e) {
      r = SuiteResult{name, false, 0.0, 0.0, std::string("error: ") + e.what(), 0.0};
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t).count();
    results.push_back(std::move(r));
  }
  const double total = std::chrono::duration<double>(Clock::now() - t0).count();
  results.push_back(SuiteResult{"runtime", total < options.time_budget_s, total,
                                options.time_budget_s, "total seconds", total});
  return results;
}

}  // namespace wrfm
