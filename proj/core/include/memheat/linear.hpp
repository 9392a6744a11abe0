#pragma once

#include "memheat/mesh.hpp"

#include <span>

namespace memheat {

/// Thomas algorithm for a tridiagonal system. sub[0] and super[n-1] are
/// ignored. No pivoting: the caller guarantees diagonal dominance.
/// rhs is overwritten with the solution.
void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> super, std::span<double> rhs);

/// Block Thomas for nc x nc diagonal blocks (row-major, node-major) and
/// off-diagonal blocks equal to `off` times the identity.
void solve_block_tridiagonal(int nc, std::span<const double> diag_blocks, double off,
                             std::span<double> rhs);

/// Solves (blockdiag(B_n) - dt Lap_h) x = rhs, where B_n is the nc x nc block
/// of node n. 1D uses the (block) Thomas algorithm; 2D uses BiCGSTAB with an
/// incomplete-LU preconditioner down to 1e-12 relative residual, falling back
/// to a sparse LU when the iteration stalls.
void solve_shifted_laplacian(const Mesh& mesh, int nc, std::span<const double> blocks, double dt,
                             std::span<double> rhs);

}  // namespace memheat
