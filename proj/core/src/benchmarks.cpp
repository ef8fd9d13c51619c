#include "wrfm/benchmarks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "wrfm/errors.hpp"

namespace wrfm {

namespace {

constexpr double kPi = std::numbers::pi;

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

double indicator(double v) { return v > 0.0 ? 1.0 : 0.0; }

AxisBox box2(double x0, double x1, double y0, double y1) {
  const double lo[] = {x0, y0};
  const double hi[] = {x1, y1};
  return AxisBox::make(lo, hi);
}

AxisBox box3(double x0, double x1, double y0, double y1, double z0, double z1) {
  const double lo[] = {x0, y0, z0};
  const double hi[] = {x1, y1, z1};
  return AxisBox::make(lo, hi);
}

ProblemSpec helmholtz(std::string name, Domain domain, double lambda, ProblemDefaults defaults) {
  auto exact = [](const Vec& p) { return std::sinh(std::abs(p[0])) * std::cos(p[1] * p[1]); };
  auto source = [lambda](const Vec& p) {
    const double y2 = p[1] * p[1];
    return std::sinh(std::abs(p[0])) *
           ((1.0 + lambda - 4.0 * y2) * std::cos(y2) - 2.0 * std::sin(y2));
  };
  return ProblemSpec{std::move(name),
                     std::move(domain),
                     LinearOperator::laplacian(2, lambda),
                     source,
                     [exact](const Vec& p, const FaceTag&) { return exact(p); },
                     {},
                     exact,
                     defaults};
}

ProblemSpec static_heat(const ProblemParameters& params) {
  std::vector<Exclusion> holes;
  if (params.exclusions)
    holes = *params.exclusions;
  else
    holes.emplace_back(box2(1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0));
  auto exact = [](const Vec& p) {
    const double x = p[0], y = p[1];
    return (4.5 * (x * x - x) + 1.0) * indicator((x - y) * (y + x - 1.0)) +
           (4.5 * (y - y * y) - 1.0) * indicator((y - x) * (y + x - 1.0));
  };
  auto source = [](const Vec& p) {
    return 9.0 * sgn((p[0] - p[1]) * (p[1] + p[0] - 1.0));
  };
  auto dirichlet = [](const Vec&, const FaceTag& tag) {
    if (tag.kind == FaceTag::Kind::exclusion) return 0.0;
    return tag.axis == 0 ? 1.0 : -1.0;
  };
  ProblemDefaults d;
  d.subdomains = {1, 1, 1};
  d.features = 500;
  d.tests = {50, 50, 1};
  d.boundary_partitions = {100, 100, 1};
  // The reference is discontinuous; wider features and a looser cutoff keep
  // the least-squares fit from chasing the jumps.
  d.feature_range = 2.0;
  d.rcond = 1e-4;
  d.metric_grid = {201, 201, 1};
  return ProblemSpec{"static_heat2d",
                     Domain(box2(0.0, 1.0, 0.0, 1.0), std::move(holes)),
                     LinearOperator::laplacian(2),
                     source,
                     dirichlet,
                     {},
                     exact,
                     d};
}

ProblemSpec poisson3d(const ProblemParameters& params) {
  auto exact = [](const Vec& p) {
    const double s = p[0] - indicator(p[0] - 0.5);
    return s * s * std::sin(p[1]) * std::exp(-p[2]);
  };
  ProblemDefaults d;
  d.subdomains = {2, 1, 1};
  d.features = 100;
  d.tests = {15, 15, 15};
  d.boundary_partitions = {25, 50, 50};
  d.metric_grid = {101, 101, 101};
  return ProblemSpec{"poisson3d",
                     Domain(box3(0.0, 1.0, -kPi / 2, kPi / 2, 0.0, 0.5),
                            params.exclusions.value_or(std::vector<Exclusion>{})),
                     LinearOperator::laplacian(3),
                     [](const Vec& p) { return 2.0 * std::sin(p[1]) * std::exp(-p[2]); },
                     [exact](const Vec& p, const FaceTag&) { return exact(p); },
                     {},
                     exact,
                     d};
}

ProblemSpec heat3d(const ProblemParameters& params) {
  const double a = params.heat_rate.value_or(1.0);
  const double a2 = a * a;
  auto exact = [a2](const Vec& p) {
    return std::sin(std::abs(p[0]) + std::abs(p[1]) - 1.0) * std::exp(-p[2] * p[2] / a2);
  };
  auto source = [a2](const Vec& p) {
    return 2.0 * std::sin(std::abs(p[0]) + std::abs(p[1]) - 1.0) * (p[2] - 1.0) *
           std::exp(-p[2] * p[2] / a2);
  };
  ProblemDefaults d;
  d.subdomains = {2, 1, 1};
  d.features = 200;
  d.tests = {15, 15, 15};
  d.boundary_partitions = {50, 50, 50};
  d.metric_grid = {101, 101, 101};
  return ProblemSpec{"heat3d",
                     Domain(box3(-1.0, 1.0, 0.0, 1.0, 0.0, 1.0),
                            params.exclusions.value_or(std::vector<Exclusion>{})),
                     LinearOperator::heat(2, a2),
                     source,
                     [exact](const Vec& p, const FaceTag&) { return exact(p); },
                     // No data on the final-time face.
                     [](const FaceTag& tag) {
                       return !(tag.kind == FaceTag::Kind::outer && tag.axis == 2 && tag.side == 1);
                     },
                     exact,
                     d};
}

ProblemSpec manufactured(const ProblemParameters& params) {
  auto exact = [](const Vec& p) { return std::sin(kPi * p[0]) * std::sin(kPi * p[1]); };
  ProblemDefaults d;
  d.subdomains = {1, 1, 1};
  d.features = 200;
  d.tests = {20, 20, 1};
  d.boundary_partitions = {40, 40, 1};
  d.metric_grid = {101, 101, 1};
  return ProblemSpec{"manufactured_poisson2d",
                     Domain(box2(0.0, 1.0, 0.0, 1.0),
                            params.exclusions.value_or(std::vector<Exclusion>{})),
                     LinearOperator::laplacian(2),
                     [exact](const Vec& p) { return -2.0 * kPi * kPi * exact(p); },
                     [exact](const Vec& p, const FaceTag&) { return exact(p); },
                     {},
                     exact,
                     d};
}

double mean(const std::vector<double>& v) {
  // Sorted accumulation keeps the result independent of completion order.
  std::vector<double> s = v;
  std::sort(s.begin(), s.end());
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  std::vector<double> sq;
  for (double x : v) sq.push_back((x - m) * (x - m));
  std::sort(sq.begin(), sq.end());
  return std::sqrt(std::accumulate(sq.begin(), sq.end(), 0.0) /
                   static_cast<double>(v.size() - 1));
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"helmholtz2d_regular", "helmholtz2d_complex", "static_heat2d",
          "poisson3d",           "heat3d",              "manufactured_poisson2d"};
}

std::vector<Exclusion> hex_disk_layout() {
  // Two staggered rows of four disks centred on (-0.5, 0.5).
  std::vector<Exclusion> disks;
  for (int row = 0; row < 2; ++row) {
    const double y = row == 0 ? 0.625 : 0.375;
    const double shift = row == 0 ? -0.0625 : 0.0625;
    for (int i = 0; i < 4; ++i) disks.emplace_back(Disk{-0.5 + 0.25 * (i - 1.5) + shift, y, 0.05});
  }
  return disks;
}

ProblemSpec builtin(std::string_view name, const ProblemParameters& params) {
  const double lambda = params.helmholtz_lambda.value_or(1.0);
  if (name == "helmholtz2d_regular") {
    ProblemDefaults d;
    d.subdomains = {4, 1, 1};
    d.features = 40;
    d.tests = {25, 25, 1};
    d.boundary_partitions = {50, 100, 1};
    d.metric_grid = {201, 201, 1};
    return helmholtz("helmholtz2d_regular",
                     Domain(box2(-1.0, 1.0, 0.0, 1.0),
                            params.exclusions.value_or(std::vector<Exclusion>{})),
                     lambda, d);
  }
  if (name == "helmholtz2d_complex") {
    ProblemDefaults d;
    d.subdomains = {3, 1, 1};
    d.features = 100;
    d.tests = {25, 15, 1};
    d.boundary_partitions = {150, 100, 1};
    d.metric_grid = {201, 201, 1};
    return helmholtz("helmholtz2d_complex",
                     Domain(box2(-2.0, 1.0, 0.0, 1.0), params.exclusions.value_or(hex_disk_layout())),
                     lambda, d);
  }
  if (name == "static_heat2d") return static_heat(params);
  if (name == "poisson3d") return poisson3d(params);
  if (name == "heat3d") return heat3d(params);
  if (name == "manufactured_poisson2d") return manufactured(params);
  throw InvalidArgument("unknown problem '" + std::string(name) + "'");
}

MetricsReport metrics(const std::function<double(const Vec&)>& solution, const ProblemSpec& spec,
                      const MultiIndex& grid) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!spec.reference) throw UnsupportedConfiguration("problem has no reference solution");
  const int dim = spec.dim();
  for (int i = 0; i < dim; ++i)
    if (grid[i] < 2) throw InvalidArgument("metric grid needs >= 2 points per axis");
  const AxisBox& box = spec.domain.bounding();
  MultiIndex n{1, 1, 1};
  for (int i = 0; i < dim; ++i) n[i] = grid[i];

  double err2 = 0.0, ref2 = 0.0, err_max = 0.0, ref_max = 0.0;
  std::size_t count = 0;
  for (int c = 0; c < n[2]; ++c)
    for (int b = 0; b < n[1]; ++b)
      for (int a = 0; a < n[0]; ++a) {
        const MultiIndex idx{a, b, c};
        Vec x{};
        for (int i = 0; i < dim; ++i)
          x[i] = idx[i] == n[i] - 1 ? box.hi[i]
                                    : box.lo[i] + (box.hi[i] - box.lo[i]) * idx[i] / (n[i] - 1);
        if (!spec.domain.contains(x)) continue;
        const double ue = (*spec.reference)(x);
        const double e = solution(x) - ue;
        err2 += e * e;
        ref2 += ue * ue;
        err_max = std::max(err_max, std::abs(e));
        ref_max = std::max(ref_max, std::abs(ue));
        ++count;
      }
  if (ref2 == 0.0 || ref_max == 0.0) throw InvalidInput("reference solution vanishes on the grid");
  MetricsReport r;
  r.l2 = std::sqrt(err2 / ref2);
  r.linf = err_max / ref_max;
  r.points = count;
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

MetricsReport metrics(const GlobalModel& model, const ProblemSpec& spec, const MultiIndex& grid) {
  MetricsReport r = metrics([&model](const Vec& x) { return model.eval(x); }, spec, grid);
  r.parameters = model.num_columns();
  return r;
}

std::uint64_t derived_seed(std::uint64_t base, int repeat) {
  std::uint64_t x = base + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(repeat + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<SweepRow> sensitivity_sweep(const ProblemSpec& spec, const SolverConfig& base,
                                        std::span<const int> s_values,
                                        std::span<const int> j_values,
                                        const SweepOptions& options) {
  if (options.repeats < 2) throw InvalidArgument("a sweep needs at least 2 repeats");
  MultiIndex grid = options.metric_grid;
  for (int i = 0; i < kMaxDim; ++i)
    if (grid[i] == 0) grid[i] = spec.defaults.metric_grid[i];

  std::vector<SweepRow> rows;
  for (int s : s_values) {
    for (int j : j_values) {
      SweepRow row;
      row.subdomains = s;
      row.features = j;
      row.repeats = options.repeats;
      std::vector<double> times;
      for (int r = 0; r < options.repeats; ++r) {
        SolverConfig c = base;
        c.subdomains = {s, 1, 1};
        c.features = j;
        c.seed = options.identical_seeds ? base.seed : derived_seed(base.seed, r);
        const SolveResult result = solve_problem(spec, c);
        const MetricsReport m = metrics(result.model, spec, grid);
        row.parameters = result.model.num_columns();
        row.l2_samples.push_back(m.l2);
        row.linf_samples.push_back(m.linf);
        times.push_back(result.report.wall_time_s);
      }
      row.l2_mean = mean(row.l2_samples);
      row.l2_std = sample_std(row.l2_samples);
      row.linf_mean = mean(row.linf_samples);
      row.linf_std = sample_std(row.linf_samples);
      row.time_mean_s = mean(times);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace wrfm
