#include "memheat/solver.hpp"
#include "memheat/weak_form.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace memheat;

namespace {

struct Stored {
  RunResult result;
  std::vector<double> times;
};

Stored solve(int cells, double dt, const std::optional<RelaxationKernel>& g) {
  const Mesh m = build_mesh(1, 1.0, cells);
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_final = 1.0;
  RunOptions opt;
  opt.keep_snapshots = true;
  Stored s{run(make_initial_field(m, 1, InitialCondition{}), cfg, g, MatrixA::identity(1), opt), {}};
  s.times = s.result.trace.t;
  return s;
}

RelaxationKernel power_law() {
  KernelParams p;
  p.a = 1.0;
  p.nu = 3.0;
  return make_kernel(KernelFamily::PowerLaw, p);
}

}  // namespace

TEST(WeakForm, ZeroSolution) {
  const Mesh m = build_mesh(1, 1.0, 16);
  const std::vector<double> times{0.0, 0.1, 0.2};
  const std::vector<Field> snaps(3, Field(m, 1));
  EXPECT_EQ(weak_residual(times, snaps, power_law(), MatrixA::identity(1), 2.0, 0.0), 0.0);
}

TEST(WeakForm, HeatSchemeSatisfiesDiscreteForm) {
  const Stored s = solve(32, 0.01, std::nullopt);
  EXPECT_LE(weak_residual(s.times, s.result.snapshots, std::nullopt, MatrixA::identity(1), 2.0, 0.0),
            1e-9);
}

TEST(WeakForm, FirstOrderUnderRefinement) {
  const auto g = power_law();
  const Stored c = solve(32, 0.02, g);
  const Stored f = solve(64, 0.01, g);
  const double rc = weak_residual(c.times, c.result.snapshots, g, MatrixA::identity(1), 2.0, 0.0);
  const double rf = weak_residual(f.times, f.result.snapshots, g, MatrixA::identity(1), 2.0, 0.0);
  EXPECT_GT(rc, 0.0);
  EXPECT_GE(rc / rf, 1.8);
}

TEST(WeakForm, NoiseIsDetected) {
  const auto g = power_law();
  Stored s = solve(32, 0.01, g);
  const double clean = weak_residual(s.times, s.result.snapshots, g, MatrixA::identity(1), 2.0, 0.0);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  auto noisy = s.result.snapshots;
  for (auto& f : noisy) {
    for (double& v : f.values) v *= 1.0 + u(rng);
  }
  const double dirty = weak_residual(s.times, noisy, g, MatrixA::identity(1), 2.0, 0.0);
  EXPECT_GE(dirty, 10.0 * clean);
}
