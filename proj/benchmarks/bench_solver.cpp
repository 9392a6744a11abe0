#include "memheat/linear.hpp"
#include "memheat/solver.hpp"

#include <benchmark/benchmark.h>

using namespace memheat;

namespace {

void BM_StepHeat1D(benchmark::State& state) {
  const Mesh m = build_mesh(1, 1.0, static_cast<int>(state.range(0)));
  const Field u = make_initial_field(m, 1, InitialCondition{});
  const std::vector<double> memory(m.node_count(), 0.0);
  const SolverConfig cfg;
  for (auto _ : state) {
    Field next = step(u, 1e-3, 1e-3, memory, cfg, MatrixA::identity(1), 0.0);
    benchmark::DoNotOptimize(next.values.data());
  }
}

void BM_StepQuartic1D(benchmark::State& state) {
  const Mesh m = build_mesh(1, 1.0, static_cast<int>(state.range(0)));
  const Field u = make_initial_field(m, 1, InitialCondition{});
  const std::vector<double> memory(m.node_count(), 0.0);
  SolverConfig cfg;
  cfg.m = 4.0;
  const double eps = regularisation(cfg, u);
  for (auto _ : state) {
    Field next = step(u, 1e-3, 1e-3, memory, cfg, MatrixA::identity(1), eps);
    benchmark::DoNotOptimize(next.values.data());
  }
}

void BM_ShiftedLaplacian2D(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const Mesh m = build_mesh(2, 1.0, cells);
  const std::vector<double> blocks(m.node_count(), 1.0);
  std::vector<double> rhs(m.node_count(), 1.0);
  for (auto _ : state) {
    std::fill(rhs.begin(), rhs.end(), 1.0);
    solve_shifted_laplacian(m, 1, blocks, 1e-3, rhs);
    benchmark::DoNotOptimize(rhs.data());
  }
}

void BM_RunPowerLaw(benchmark::State& state) {
  const Mesh m = build_mesh(1, 1.0, 64);
  KernelParams p;
  p.a = 1.0;
  p.nu = 3.0;
  const auto g = make_kernel(KernelFamily::PowerLaw, p);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_final = static_cast<double>(state.range(0));
  const Field u0 = make_initial_field(m, 1, InitialCondition{});
  for (auto _ : state) {
    RunResult r = run(u0, cfg, g, MatrixA::identity(1));
    benchmark::DoNotOptimize(r.trace.E.data());
  }
}

}  // namespace

BENCHMARK(BM_StepHeat1D)->Arg(64)->Arg(1024);
BENCHMARK(BM_StepQuartic1D)->Arg(64)->Arg(1024);
BENCHMARK(BM_ShiftedLaplacian2D)->Arg(16)->Arg(64);
BENCHMARK(BM_RunPowerLaw)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
