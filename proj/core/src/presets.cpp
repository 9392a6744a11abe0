#include "memheat/presets.hpp"

#include "memheat/error.hpp"
#include "memheat/kernel.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace memheat {

std::vector<std::string> preset_names() { return {"example31", "example32", "heat-check"}; }

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  c.mesh.dim = 1;
  c.mesh.extent = 1.0;
  c.field.components = 1;
  c.field.initial = "sine";
  c.solver.m = 2.0;
  if (name == "example31" || name == "example32") {
    if (name == "example31") {
      c.kernel.family = "power_law";
      c.kernel.a = 1.0;
      c.kernel.nu = 3.0;
    } else {
      c.kernel.family = "stretched_exp";
      c.kernel.a = std::numbers::e / 8.0;
      c.kernel.b = 1.0;
      c.kernel.alpha = 0.5;
    }
    c.mesh.cells = 64;
    c.solver.dt = 0.01;
    c.solver.t_final = 200.0;
    c.solver.time_mesh = "geometric(1.00065)";
    c.output.dir = name;
    return c;
  }
  if (name == "heat-check") {
    c.kernel.family = "none";
    c.mesh.cells = 256;
    c.solver.dt = 1e-4;
    c.solver.t_final = 0.1;
    c.analysis.refine_horizon = 0.1;
    c.output.dir = name;
    return c;
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown preset '" + name + "'");
}

RunConfig randomized_config(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Raw engine bits keep the draw identical across standard libraries.
  auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  auto pick = [&rng](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

  RunConfig c;
  c.preset = "random-" + std::to_string(seed);
  c.seed = seed;
  const double mass = uniform(0.2, 0.7);
  switch (pick(3)) {
    case 0: {
      const double nu = uniform(2.5, 4.0);
      c.kernel.family = "power_law";
      c.kernel.nu = nu;
      c.kernel.a = mass * (nu - 1.0);
      break;
    }
    case 1: {
      const double alpha = uniform(0.4, 1.0);
      const double b = uniform(0.5, 1.5);
      c.kernel.family = "stretched_exp";
      c.kernel.alpha = alpha;
      c.kernel.b = b;
      KernelParams unit;
      unit.a = 1.0;
      unit.b = b;
      unit.alpha = alpha;
      const double upper = *make_kernel(KernelFamily::StretchedExp, unit).closed_form_mass();
      c.kernel.a = mass / upper;
      break;
    }
    default: {
      const double b = uniform(0.5, 3.0);
      c.kernel.family = "pure_exp";
      c.kernel.b = b;
      c.kernel.a = mass * b;
      break;
    }
  }
  c.mesh.dim = pick(4) == 0 ? 2 : 1;
  c.mesh.extent = uniform(0.5, 2.0);
  c.mesh.cells = c.mesh.dim == 2 ? 8 + pick(5) : 16 + pick(33);
  c.field.components = 1 + pick(2);
  switch (pick(3)) {
    case 0: c.field.initial = "sine"; break;
    case 1: c.field.initial = "bump"; break;
    default: c.field.initial = "random(" + std::to_string(rng() % 100000) + ")"; break;
  }
  c.solver.m = pick(2) == 0 ? 2.0 : uniform(2.0, 3.0);
  c.solver.dt = uniform(0.005, 0.03);
  c.solver.t_final = uniform(1.0, 3.0);
  if (pick(2) == 0) c.solver.time_mesh = "geometric(" + format_double(1.0 + uniform(0.0, 0.02)) + ")";
  if (pick(2) == 0) {
    const int nc = c.components();
    c.A.mode = "constant";
    // Symmetric, diagonally dominant: eigenvalues above the diagonal minus
    // the off-diagonal row sum.
    std::vector<double> e(static_cast<std::size_t>(nc * nc), 0.0);
    double floor = 1e300;
    for (int i = 0; i < nc; ++i) e[i * nc + i] = uniform(1.0, 3.0);
    for (int i = 0; i < nc; ++i) {
      for (int j = i + 1; j < nc; ++j) e[i * nc + j] = e[j * nc + i] = uniform(-0.4, 0.4);
    }
    for (int i = 0; i < nc; ++i) {
      double off = 0.0;
      for (int j = 0; j < nc; ++j) {
        if (j != i) off += std::abs(e[i * nc + j]);
      }
      floor = std::min(floor, e[i * nc + i] - off);
    }
    c.A.entries = e;
    c.A.c0 = 0.5 * floor;
  }
  c.output.dir = c.preset;
  return c;
}

}  // namespace memheat
