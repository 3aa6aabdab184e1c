#include <benchmark/benchmark.h>

#include "eikograph/graph.hpp"
#include "eikograph/rng.hpp"
#include "eikograph/solver.hpp"

using namespace eikograph;

namespace {

Graph sphere_graph(std::size_t n, double epsilon) {
  const auto spec = ManifoldSpec::sphere(2, 1.0);
  const auto kernel = make_kernel("triangular");
  const auto kc = kernel_constants(kernel);
  const auto cloud = sample_points(spec, n, "uniform", 1);
  Graph g = build_graph(cloud, kernel, kc, epsilon);
  g.boundary_mask = mark_boundary(cloud, BoundarySpec::cap({0.0, 0.0, 1.0}, 0.3),
                                  kernel.a, epsilon, 0.5);
  return g;
}

void BM_BuildGraph(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto spec = ManifoldSpec::sphere(2, 1.0);
  const auto kernel = make_kernel("triangular");
  const auto kc = kernel_constants(kernel);
  const auto cloud = sample_points(spec, n, "uniform", 1);
  const double epsilon = 0.3;
  for (auto _ : state) {
    auto g = build_graph(cloud, kernel, kc, epsilon);
    benchmark::DoNotOptimize(g.neighbors.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BuildGraph)->Arg(1000)->Arg(4000)->Arg(16000);

void BM_NonlocalGradient(benchmark::State& state) {
  const auto g = sphere_graph(static_cast<std::size_t>(state.range(0)), 0.3);
  Rng rng(2);
  std::vector<double> f(g.n());
  for (auto& v : f) v = rng.uniform(0.0, 1.0);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nonlocal_gradient(g, f, i));
    i = (i + 1) % g.n();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NonlocalGradient)->Arg(1000)->Arg(8000);

void BM_EulerStep(benchmark::State& state) {
  const auto g = sphere_graph(static_cast<std::size_t>(state.range(0)), 0.3);
  const std::vector<double> pot(g.n(), 1.0), init(g.n(), 0.0);
  const double dt = cfl_bound(g.constants, g.epsilon);
  Field f;
  f.values.assign(g.n(), 0.0);
  for (auto _ : state) {
    f = euler_step(g, f, pot, dt, init);
    benchmark::DoNotOptimize(f.values.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(g.undirected_edge_count()));
}
BENCHMARK(BM_EulerStep)->Arg(1000)->Arg(8000);

void BM_SolveToHorizon(benchmark::State& state) {
  const auto g = sphere_graph(2000, 0.35);
  SolverConfig cfg;
  cfg.epsilon = 0.35;
  cfg.T = 1.0;
  cfg.snapshot_every = 1 << 20;  // keep only endpoints
  for (auto _ : state) {
    auto traj = solve(g, cfg);
    benchmark::DoNotOptimize(traj.snapshots.back().values.data());
  }
}
BENCHMARK(BM_SolveToHorizon);

}  // namespace

BENCHMARK_MAIN();
