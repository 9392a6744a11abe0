#include "memheat/weak_form.hpp"

#include "memheat/error.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace memheat {

namespace {

Field sine_mode(const Mesh& mesh, int nc, int comp, int jx, int jy) {
  Field phi(mesh, nc);
  const int nx = mesh.interior(0);
  const int ny = mesh.interior(1);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double v = std::sin(jx * std::numbers::pi * mesh.coord(0, i) / mesh.extent[0]);
      if (mesh.dim == 2) v *= std::sin(jy * std::numbers::pi * mesh.coord(1, j) / mesh.extent[1]);
      phi.at(static_cast<std::size_t>(j) * nx + i, comp) = v;
    }
  }
  return phi;
}

}  // namespace

double weak_residual(std::span<const double> times, std::span<const Field> snaps,
                     const std::optional<RelaxationKernel>& kernel, const MatrixA& amat, double m,
                     double eps, int modes) {
  const std::size_t n = times.size();
  if (snaps.size() != n) throw Error(ErrorKind::ShapeMismatch, "one snapshot per stamp is required");
  if (modes < 1) throw Error(ErrorKind::InvalidParameter, "need at least one test mode");
  if (n < 2) return 0.0;
  const Mesh& mesh = snaps.front().mesh;
  const int nc = snaps.front().components;
  for (const auto& s : snaps) require_same_shape(s, snaps.front());

  // A Phi_eps(v_k) per step, reused across test functions.
  std::vector<Field> damping(n, Field(mesh, nc));
  std::vector<double> v(snaps.front().values.size()), phi(v.size());
  for (std::size_t k = 1; k < n; ++k) {
    const double dt = times[k] - times[k - 1];
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (snaps[k].values[i] - snaps[k - 1].values[i]) / dt;
    phi_eps(nc, m, eps, v, phi);
    const Eigen::MatrixXd a = amat.at(times[k]);
    for (std::size_t node = 0; node < mesh.node_count(); ++node) {
      Eigen::Map<const Eigen::VectorXd> p(phi.data() + node * nc, nc);
      Eigen::Map<Eigen::VectorXd>(damping[k].values.data() + node * nc, nc) = a * p;
    }
  }

  // Projections <u^k, Lap_h phi> = -<grad u^k, grad phi> and <A Phi, phi>
  // for every test function.
  std::vector<std::vector<double>> proj, damp;
  const int jy_max = mesh.dim == 2 ? modes : 1;
  for (int comp = 0; comp < nc; ++comp) {
    for (int jx = 1; jx <= modes; ++jx) {
      for (int jy = 1; jy <= jy_max; ++jy) {
        const Field test = sine_mode(mesh, nc, comp, jx, jy);
        const Field lap_test = apply_laplacian(test);
        auto& pr = proj.emplace_back(n);
        auto& dm = damp.emplace_back(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
          pr[k] = inner(snaps[k], lap_test);
          if (k > 0) dm[k] = inner(damping[k], test);
        }
      }
    }
  }

  const std::size_t tests = proj.size();
  std::vector<double> mem(tests);
  double worst = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    std::fill(mem.begin(), mem.end(), 0.0);
    if (kernel) {
      double gb = kernel->value(times[k] - times[0]);
      for (std::size_t j = 0; j < k; ++j) {
        const double ga = gb;
        gb = kernel->value(times[k] - times[j + 1]);
        const double h = 0.5 * (times[j + 1] - times[j]);
        for (std::size_t f = 0; f < tests; ++f) mem[f] += h * (ga * proj[f][j] + gb * proj[f][j + 1]);
      }
    }
    for (std::size_t f = 0; f < tests; ++f) {
      worst = std::max(worst, std::abs(damp[f][k] - proj[f][k] + mem[f]));
    }
  }
  return worst;
}

}  // namespace memheat
