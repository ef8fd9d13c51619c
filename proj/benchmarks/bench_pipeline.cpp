#include <random>

#include <benchmark/benchmark.h>

#include "wrfm/benchmarks.hpp"
#include "wrfm/quadrature.hpp"
#include "wrfm/solver.hpp"

namespace {

using namespace wrfm;

void BM_GaussNodes(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gauss_nodes(q, 0.0, 1.0));
}
BENCHMARK(BM_GaussNodes)->Arg(40)->Arg(160);

void BM_FeatureMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int counts[] = {1, 1};
  const auto dec = decompose(AxisBox::make(std::array{0.0, 0.0}, std::array{1.0, 1.0}), counts);
  const auto basis = sample_basis(dec.subdomains[0], n, 1.0, 1, Activation::tanh, {});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  std::vector<Vec> points(4096);
  for (auto& p : points) p = {u(rng), u(rng), 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(basis.eval_matrix(points));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(points.size()) * n);
}
BENCHMARK(BM_FeatureMatrix)->Arg(40)->Arg(500);

// Assembly of the tuned weak system for one builtin problem.
void BM_WeakAssembly(benchmark::State& state, const char* name) {
  const auto problem = builtin(name);
  const SolverConfig c = SolverConfig{}.resolved(problem);
  const auto dec = decompose(problem.domain.bounding(),
                             std::span<const int>(c.subdomains.data(), problem.dim()));
  const auto bases = sample_bases(dec, c);
  for (auto _ : state) benchmark::DoNotOptimize(build_system(problem, c, dec, bases));
}
BENCHMARK_CAPTURE(BM_WeakAssembly, helmholtz_regular, "helmholtz2d_regular")
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_WeakAssembly, helmholtz_complex, "helmholtz2d_complex")
    ->Unit(benchmark::kMillisecond);

void BM_LeastSquares(benchmark::State& state) {
  const auto rows = state.range(0), cols = state.range(1);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(rows);
  for (auto _ : state) benchmark::DoNotOptimize(least_squares(a, b, 1e-12));
}
BENCHMARK(BM_LeastSquares)->Args({3400, 160})->Args({3000, 500})->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state, const char* name, Pipeline pipeline) {
  const auto problem = builtin(name);
  SolverConfig c;
  c.pipeline = pipeline;
  for (auto _ : state) benchmark::DoNotOptimize(solve_problem(problem, c));
}
BENCHMARK_CAPTURE(BM_Solve, helmholtz_regular_weak, "helmholtz2d_regular", Pipeline::weak)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, manufactured_weak, "manufactured_poisson2d", Pipeline::weak)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, manufactured_strong, "manufactured_poisson2d", Pipeline::strong)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
