#pragma once

#include "memheat/kernel.hpp"
#include "memheat/mesh.hpp"
#include "memheat/solver.hpp"

#include <optional>
#include <span>

namespace memheat {

/// Discrete weak-form residual of a stored run, with the kernel inside the
/// history integral. Test functions are products of a spatial sine mode
/// sin(j pi x / L) (per axis, j <= modes, one component at a time) and the
/// indicator of one time step, normalised by the step length. For step k
///   r_k = <A Phi_eps(v_k), phi> + <grad u^k, grad phi>
///         - <int_0^{t_k} g(t_k - s) grad u(s) ds, grad phi>
/// with v_k the backward difference quotient and the history integral taken
/// by the trapezoid rule over the stamps. Returns max |r_k| over all test
/// functions and steps. Zero for the zero solution.
double weak_residual(std::span<const double> times, std::span<const Field> snapshots,
                     const std::optional<RelaxationKernel>& kernel, const MatrixA& a, double m,
                     double eps, int modes = 3);

}  // namespace memheat
