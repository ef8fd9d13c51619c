#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wrfm/feature_basis.hpp"
#include "wrfm/problem.hpp"
#include "wrfm/solver.hpp"

namespace wrfm {

/// Optional overrides for the builtin problems.
struct ProblemParameters {
  std::optional<double> helmholtz_lambda;      // default 1
  std::optional<double> heat_rate;             // a, default 1
  std::optional<std::vector<Exclusion>> exclusions;  // replaces the builtin holes
};

/// Names accepted by builtin().
std::vector<std::string> builtin_names();

/// helmholtz2d_regular, helmholtz2d_complex, static_heat2d, poisson3d, heat3d,
/// plus manufactured_poisson2d (u = sin(pi x) sin(pi y) on the unit square).
ProblemSpec builtin(std::string_view name, const ProblemParameters& params = {});

/// Centres of the eight hex-packed disks of helmholtz2d_complex.
std::vector<Exclusion> hex_disk_layout();

struct MetricsReport {
  double l2 = 0.0;
  double linf = 0.0;
  std::size_t points = 0;
  double wall_time_s = 0.0;
  int parameters = 0;
  Eigen::Index rows = 0;
  std::uint64_t seed = 0;
};

/// Relative discrete l2 and l-infinity errors over a uniform grid (endpoints
/// included) restricted to points inside the domain.
MetricsReport metrics(const std::function<double(const Vec&)>& solution, const ProblemSpec& spec,
                      const MultiIndex& grid);
MetricsReport metrics(const GlobalModel& model, const ProblemSpec& spec, const MultiIndex& grid);

struct SweepRow {
  int subdomains = 0;
  int features = 0;
  int parameters = 0;
  int repeats = 0;
  double l2_mean = 0.0;
  double l2_std = 0.0;
  double linf_mean = 0.0;
  double linf_std = 0.0;
  double time_mean_s = 0.0;
  std::vector<double> l2_samples;    // one per repeat, in repeat order
  std::vector<double> linf_samples;
};

struct SweepOptions {
  int repeats = 10;
  /// Every repeat reuses the base seed (determinism check).
  bool identical_seeds = false;
  MultiIndex metric_grid{0, 0, 0};
};

/// Seed used for repeat r of a sweep.
std::uint64_t derived_seed(std::uint64_t base, int repeat);

/// For each (S, J) pair, solves with S subdomains along x and J features per
/// subdomain for every repeat and aggregates. Rows are ordered S-major.
std::vector<SweepRow> sensitivity_sweep(const ProblemSpec& spec, const SolverConfig& base,
                                        std::span<const int> s_values,
                                        std::span<const int> j_values,
                                        const SweepOptions& options);

}  // namespace wrfm
