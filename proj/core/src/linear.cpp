#include "memheat/linear.hpp"

#include "memheat/error.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <vector>

namespace memheat {

void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> super, std::span<double> rhs) {
  const std::size_t n = diag.size();
  if (sub.size() != n || super.size() != n || rhs.size() != n) {
    throw Error(ErrorKind::ShapeMismatch, "tridiagonal bands differ in length");
  }
  if (n == 0) return;
  std::vector<double> c(n);
  double beta = diag[0];
  rhs[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    c[i - 1] = super[i - 1] / beta;
    beta = diag[i] - sub[i] * c[i - 1];
    rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

void solve_block_tridiagonal(int nc, std::span<const double> diag_blocks, double off,
                             std::span<double> rhs) {
  using Mat = Eigen::MatrixXd;
  using Vec = Eigen::VectorXd;
  const std::size_t bs = static_cast<std::size_t>(nc) * nc;
  const std::size_t n = rhs.size() / nc;
  if (diag_blocks.size() != n * bs) {
    throw Error(ErrorKind::ShapeMismatch, "block count does not match the right-hand side");
  }
  // Forward sweep keeps C_i = off * D_i^{-1} for the back substitution.
  std::vector<Mat> c(n);
  Mat d_prev;
  Eigen::PartialPivLU<Mat> lu;
  for (std::size_t i = 0; i < n; ++i) {
    Mat d = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        diag_blocks.data() + i * bs, nc, nc);
    Eigen::Map<Vec> r(rhs.data() + i * nc, nc);
    if (i > 0) {
      d -= off * c[i - 1];
      r -= off * Eigen::Map<Vec>(rhs.data() + (i - 1) * nc, nc);
    }
    lu.compute(d);
    r = lu.solve(Vec(r));
    c[i] = lu.solve(Mat::Identity(nc, nc) * off);
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    Eigen::Map<Vec>(rhs.data() + i * nc, nc) -= c[i] * Eigen::Map<Vec>(rhs.data() + (i + 1) * nc, nc);
  }
}

namespace {

void solve_2d(const Mesh& mesh, int nc, std::span<const double> blocks, double dt,
              std::span<double> rhs) {
  const int nx = mesh.interior(0);
  const int ny = mesh.interior(1);
  const double cx = dt / (mesh.h[0] * mesh.h[0]);
  const double cy = dt / (mesh.h[1] * mesh.h[1]);
  const auto n = static_cast<Eigen::Index>(rhs.size());
  const auto idx = [&](int i, int j, int c) {
    return static_cast<Eigen::Index>((static_cast<std::size_t>(j) * nx + i) * nc + c);
  };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * (4 + nc));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t node = static_cast<std::size_t>(j) * nx + i;
      for (int a = 0; a < nc; ++a) {
        const auto row = idx(i, j, a);
        for (int b = 0; b < nc; ++b) {
          double v = blocks[node * nc * nc + a * nc + b];
          if (a == b) v += 2.0 * cx + 2.0 * cy;
          if (v != 0.0) trip.emplace_back(row, idx(i, j, b), v);
        }
        if (i > 0) trip.emplace_back(row, idx(i - 1, j, a), -cx);
        if (i + 1 < nx) trip.emplace_back(row, idx(i + 1, j, a), -cx);
        if (j > 0) trip.emplace_back(row, idx(i, j - 1, a), -cy);
        if (j + 1 < ny) trip.emplace_back(row, idx(i, j + 1, a), -cy);
      }
    }
  }
  Eigen::SparseMatrix<double> mat(n, n);
  mat.setFromTriplets(trip.begin(), trip.end());
  Eigen::Map<Eigen::VectorXd> b(rhs.data(), n);

  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
  it.setTolerance(1e-12);
  it.setMaxIterations(4 * static_cast<int>(n) + 100);
  it.compute(mat);
  if (it.info() == Eigen::Success) {
    Eigen::VectorXd x = it.solve(b);
    if (it.info() == Eigen::Success && x.allFinite()) {
      b = x;
      return;
    }
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(mat);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorKind::StepFailed, "sparse factorization of the step Jacobian failed");
  }
  b = lu.solve(Eigen::VectorXd(b));
}

}  // namespace

void solve_shifted_laplacian(const Mesh& mesh, int nc, std::span<const double> blocks, double dt,
                             std::span<double> rhs) {
  if (mesh.dim == 2) {
    solve_2d(mesh, nc, blocks, dt, rhs);
    return;
  }
  const std::size_t n = mesh.node_count();
  const double off = -dt / (mesh.h[0] * mesh.h[0]);
  if (nc == 1) {
    std::vector<double> sub(n, off), diag(n), super(n, off);
    for (std::size_t i = 0; i < n; ++i) diag[i] = blocks[i] - 2.0 * off;
    solve_tridiagonal(sub, diag, super, rhs);
    return;
  }
  std::vector<double> diag(blocks.begin(), blocks.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < nc; ++c) diag[i * nc * nc + c * nc + c] -= 2.0 * off;
  }
  solve_block_tridiagonal(nc, diag, off, rhs);
}

}  // namespace memheat
