#include "memheat/memory.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace memheat;

namespace {

RelaxationKernel power_law() {
  KernelParams p;
  p.a = 1.0;
  p.nu = 3.0;
  return make_kernel(KernelFamily::PowerLaw, p);
}

// Convolution after N stored steps of length 0.01, direct vs compressed.
void run_engine(benchmark::State& state, bool compressed) {
  const Mesh m = build_mesh(1, 1.0, 64);
  const auto g = power_law();
  const int n = static_cast<int>(state.range(0));
  const double T = 0.01 * n + 0.01;
  std::optional<CompressedKernel> ck;
  if (compressed) ck = compress_kernel(g, T, 12, 1e-5, 2.0);
  MemoryEngine engine(m, 1, g, ck);
  const Field u = make_initial_field(m, 1, InitialCondition{});
  for (int k = 0; k < n; ++k) engine.push(0.01 * k, u);
  std::vector<double> out(m.node_count());
  const double t = 0.01 * n;
  engine.convolution(t, out);
  for (auto _ : state) {
    engine.convolution(t, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_ConvolutionDirect(benchmark::State& state) { run_engine(state, false); }
void BM_ConvolutionCompressed(benchmark::State& state) { run_engine(state, true); }

void BM_CompressPowerLaw(benchmark::State& state) {
  const auto g = power_law();
  for (auto _ : state) {
    auto ck = compress_kernel(g, static_cast<double>(state.range(0)), 12, 1e-5, 2.0);
    benchmark::DoNotOptimize(ck.modes.data());
  }
}

}  // namespace

BENCHMARK(BM_ConvolutionDirect)->Arg(500)->Arg(2000)->Arg(8000);
BENCHMARK(BM_ConvolutionCompressed)->Arg(500)->Arg(2000)->Arg(8000);
BENCHMARK(BM_CompressPowerLaw)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
