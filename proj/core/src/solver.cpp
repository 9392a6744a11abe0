#include "memheat/solver.hpp"

#include "memheat/error.hpp"
#include "memheat/linear.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace memheat {

void EnergyTrace::reserve(std::size_t n) {
  for (auto* col : {&t, &E, &g_circ, &g_prime_circ, &grad_sq, &dissipation, &g_value, &g_integral}) {
    col->reserve(n);
  }
}

// ---------------------------------------------------------------------------

MatrixA MatrixA::identity(int components, double c0) {
  MatrixA a;
  a.mode_ = Mode::Identity;
  a.nc_ = components;
  a.c0_ = c0;
  a.constant_ = Eigen::MatrixXd::Identity(components, components);
  return a;
}

MatrixA MatrixA::constant(Eigen::MatrixXd m, double c0) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw Error(ErrorKind::ShapeMismatch, "A must be a square matrix");
  }
  MatrixA a;
  a.mode_ = Mode::Constant;
  a.nc_ = static_cast<int>(m.rows());
  a.c0_ = c0;
  a.constant_ = std::move(m);
  return a;
}

MatrixA MatrixA::time_varying(int components, std::function<Eigen::MatrixXd(double)> fn, double c0) {
  MatrixA a;
  a.mode_ = Mode::TimeVarying;
  a.nc_ = components;
  a.c0_ = c0;
  a.fn_ = std::move(fn);
  return a;
}

Eigen::MatrixXd MatrixA::at(double t) const {
  if (mode_ != Mode::TimeVarying) return constant_;
  Eigen::MatrixXd m = fn_(t);
  if (m.rows() != nc_ || m.cols() != nc_) {
    throw Error(ErrorKind::ShapeMismatch, "A(t) has the wrong size");
  }
  return m;
}

double MatrixA::coercivity(double t) const {
  const Eigen::MatrixXd m = at(t);
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void MatrixA::validate(std::span<const double> sample_times) const {
  if (!(c0_ > 0.0)) throw Error(ErrorKind::Coercivity, "coercivity floor c0 must be positive");
  for (double t : sample_times) {
    const double lam = coercivity(t);
    if (!std::isfinite(lam) || lam < c0_ * (1.0 - 1e-12)) {
      std::ostringstream os;
      os << "min eigenvalue of sym A(" << t << ") = " << lam << " < c0 = " << c0_;
      throw Error(ErrorKind::Coercivity, os.str());
    }
    if (mode_ != Mode::TimeVarying) break;
  }
}

// ---------------------------------------------------------------------------

void validate(const SolverConfig& c, int dim) {
  if (!g3_admissible(c.m, dim)) {
    throw Error(ErrorKind::HypothesisG3, "exponent m = " + std::to_string(c.m) + " is not admissible");
  }
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw Error(ErrorKind::InvalidParameter, "dt must be positive");
  if (!(c.t_final >= 0.0) || !std::isfinite(c.t_final)) {
    throw Error(ErrorKind::InvalidParameter, "t_final must be nonnegative");
  }
  if (c.time_mesh.kind == TimeMesh::Kind::Geometric && !(c.time_mesh.ratio >= 1.0)) {
    throw Error(ErrorKind::InvalidParameter, "geometric ratio must be >= 1");
  }
  if (!(c.newton_tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "newton_tol must be positive");
  if (c.newton_max_iter < 1) throw Error(ErrorKind::InvalidParameter, "newton_max_iter must be >= 1");
  if (!(c.epsilon >= 0.0) || (c.m > 2.0 && !(c.epsilon > 0.0))) {
    throw Error(ErrorKind::InvalidParameter, "epsilon must be positive when m > 2");
  }
}

std::vector<double> make_time_stamps(const SolverConfig& c) {
  std::vector<double> t{0.0};
  if (c.t_final <= 0.0) return t;
  const double growth = c.time_mesh.kind == TimeMesh::Kind::Geometric ? c.time_mesh.ratio : 1.0;
  double dt = c.dt;
  for (long k = 1;; ++k) {
    // Multiplying stamps out of k keeps uniform meshes free of drift.
    double next = growth == 1.0 ? static_cast<double>(k) * c.dt : t.back() + dt;
    if (next >= c.t_final - 1e-9 * dt) {
      t.push_back(c.t_final);
      break;
    }
    t.push_back(next);
    dt *= growth;
  }
  return t;
}

void phi_eps(int nc, double m, double eps, std::span<const double> v, std::span<double> out) {
  const std::size_t nodes = v.size() / nc;
  if (m == 2.0) {
    std::copy(v.begin(), v.end(), out.begin());
    return;
  }
  for (std::size_t n = 0; n < nodes; ++n) {
    double sq = eps * eps;
    for (int c = 0; c < nc; ++c) sq += v[n * nc + c] * v[n * nc + c];
    const double s = std::pow(sq, 0.5 * (m - 2.0));
    for (int c = 0; c < nc; ++c) out[n * nc + c] = s * v[n * nc + c];
  }
}

double regularisation(const SolverConfig& config, const Field& u0) {
  if (config.m == 2.0) return 0.0;
  const double lap = max_abs(apply_laplacian(u0));
  return config.epsilon * std::pow(lap, 1.0 / (config.m - 1.0));
}

namespace {

double inf_norm(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

struct Residual {
  const Mesh& mesh;
  int nc;
  double m, eps, dt;
  const Eigen::MatrixXd& a;
  std::span<const double> base;  // M - Lap u^k
  std::vector<double> phi, lap;

  // F(v) = A Phi(v) - dt Lap v + base
  void operator()(std::span<const double> v, std::span<double> f) {
    phi.resize(v.size());
    lap.resize(v.size());
    phi_eps(nc, m, eps, v, phi);
    apply_laplacian(mesh, nc, v, lap);
    const std::size_t nodes = v.size() / nc;
    if (nc == 1) {
      const double a00 = a(0, 0);
      for (std::size_t n = 0; n < nodes; ++n) f[n] = a00 * phi[n] - dt * lap[n] + base[n];
      return;
    }
    for (std::size_t n = 0; n < nodes; ++n) {
      for (int r = 0; r < nc; ++r) {
        double s = 0.0;
        for (int c = 0; c < nc; ++c) s += a(r, c) * phi[n * nc + c];
        f[n * nc + r] = s - dt * lap[n * nc + r] + base[n * nc + r];
      }
    }
  }
};

void coercivity_guard(const Eigen::MatrixXd& a, double c0, int nc, std::span<const double> v) {
  const std::size_t nodes = v.size() / nc;
  for (std::size_t n : {std::size_t{0}, nodes / 2, nodes - 1}) {
    Eigen::Map<const Eigen::VectorXd> vn(v.data() + n * nc, nc);
    const double sq = vn.squaredNorm();
    const double av = vn.dot(a * vn);
    if (av < c0 * sq * (1.0 - 1e-12) - 1e-300) {
      std::ostringstream os;
      os << "(A v, v) = " << av << " < c0 |v|^2 = " << c0 * sq << " at node " << n;
      throw Error(ErrorKind::Coercivity, os.str());
    }
  }
}

}  // namespace

Field step(const Field& u, double t_next, double dt, std::span<const double> memory,
           const SolverConfig& config, const MatrixA& amat, double eps,
           std::span<const double> guess, StepStats* stats) {
  const Mesh& mesh = u.mesh;
  const int nc = u.components;
  const std::size_t dofs = u.values.size();
  if (memory.size() != dofs || (!guess.empty() && guess.size() != dofs)) {
    throw Error(ErrorKind::ShapeMismatch, "memory term or guess does not match the field");
  }
  if (amat.components() != nc) throw Error(ErrorKind::ShapeMismatch, "A does not match the components");
  const double m = config.m;
  const Eigen::MatrixXd a = amat.at(t_next);

  std::vector<double> base(dofs);
  apply_laplacian(mesh, nc, u.values, base);
  const double scale = inf_norm(base) + inf_norm(memory);
  for (std::size_t i = 0; i < dofs; ++i) base[i] = memory[i] - base[i];

  std::vector<double> v(dofs, 0.0);
  if (!guess.empty()) std::copy(guess.begin(), guess.end(), v.begin());
  Field out = u;
  if (stats) *stats = {};
  if (scale == 0.0) return out;  // zero data: v = 0 solves F exactly

  Residual residual{mesh, nc, m, eps, dt, a, base, {}, {}};
  std::vector<double> f(dofs), trial(dofs), ftrial(dofs), delta(dofs);
  std::vector<double> blocks(mesh.node_count() * nc * nc);
  residual(v, f);
  double fnorm = inf_norm(f);
  const double target = config.newton_tol * scale;
  int iter = 0;
  for (; fnorm > target; ++iter) {
    if (iter >= config.newton_max_iter) {
      std::ostringstream os;
      os << "Newton did not converge in " << iter << " iterations at t = " << t_next
         << " (||F|| = " << fnorm << ", target " << target << ")";
      throw Error(ErrorKind::StepFailed, os.str());
    }
    coercivity_guard(a, amat.c0(), nc, v);
    // Jacobian blocks A Phi'(v_n).
    for (std::size_t n = 0; n < mesh.node_count(); ++n) {
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> blk(
          blocks.data() + n * nc * nc, nc, nc);
      if (m == 2.0) {
        blk = a;
        continue;
      }
      Eigen::Map<const Eigen::VectorXd> vn(v.data() + n * nc, nc);
      const double sq = vn.squaredNorm() + eps * eps;
      const double s = std::pow(sq, 0.5 * (m - 2.0));
      Eigen::MatrixXd dphi = s * Eigen::MatrixXd::Identity(nc, nc) +
                             (m - 2.0) * (s / sq) * (vn * vn.transpose());
      blk = a * dphi;
    }
    for (std::size_t i = 0; i < dofs; ++i) delta[i] = -f[i];
    solve_shifted_laplacian(mesh, nc, blocks, dt, delta);

    double lambda = 1.0;
    for (;;) {
      for (std::size_t i = 0; i < dofs; ++i) trial[i] = v[i] + lambda * delta[i];
      residual(trial, ftrial);
      const double tnorm = inf_norm(ftrial);
      if (std::isfinite(tnorm) && tnorm < (1.0 - 1e-4 * lambda) * fnorm) {
        v.swap(trial);
        f.swap(ftrial);
        fnorm = tnorm;
        break;
      }
      lambda *= 0.5;
      if (lambda < 1e-6) {
        // Rounding floor: a full step that does not increase F is accepted.
        if (fnorm <= 1e3 * target) {
          fnorm = 0.0;
          break;
        }
        std::ostringstream os;
        os << "Newton line search stalled at t = " << t_next << " (||F|| = " << fnorm << ")";
        throw Error(ErrorKind::StepFailed, os.str());
      }
    }
  }
  for (std::size_t i = 0; i < dofs; ++i) out.values[i] = u.values[i] + dt * v[i];
  if (stats) {
    stats->newton_iterations = iter;
    stats->residual = fnorm;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

class Runner {
 public:
  Runner(const Field& u0, const SolverConfig& config, const std::optional<RelaxationKernel>& kernel,
         const MatrixA& a, const RunOptions& options)
      : config_(config), kernel_(kernel), a_(a), options_(options), u_(u0) {
    if (kernel_) engine_.emplace(u0.mesh, u0.components, *kernel_, options.compressed);
    mem_.assign(u0.values.size(), 0.0);
    v_.assign(u0.values.size(), 0.0);
    phi_.assign(u0.values.size(), 0.0);
  }

  RunResult go() {
    validate(config_, u_.mesh.dim);
    if (a_.components() != u_.components) {
      throw Error(ErrorKind::ShapeMismatch, "A size differs from the field components");
    }
    const auto stamps = make_time_stamps(config_);
    a_.validate(stamps);
    result_.epsilon = regularisation(config_, u_);
    result_.trace.reserve(stamps.size());
    record(0.0, 0.0);

    for (std::size_t k = 1; k < stamps.size(); ++k) {
      const double t0 = stamps[k - 1];
      const double t1 = stamps[k];
      try {
        advance(t0, t1);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::StepFailed) throw;
        ++result_.halvings;
        const double mid = 0.5 * (t0 + t1);
        advance(t0, mid);
        advance(mid, t1);
      }
    }
    result_.final_state = u_;
    if (engine_) result_.folded_intervals = engine_->folded_intervals();
    return std::move(result_);
  }

 private:
  void advance(double t0, double t1) {
    const double dt = t1 - t0;
    if (engine_) engine_->convolution(t1, mem_);
    StepStats stats;
    Field next = step(u_, t1, dt, mem_, config_, a_, result_.epsilon, v_, &stats);
    result_.newton_iterations += stats.newton_iterations;
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] = (next.values[i] - u_.values[i]) / dt;
    u_ = std::move(next);
    record(t1, dt);
  }

  void record(double t, double dt) {
    auto& tr = result_.trace;
    const auto edges = edge_gradients(u_);
    const double grad_sq = edge_sq_norm(u_.mesh, edges);
    MemoryModuli mod;
    double g = 0.0, big_g = 0.0;
    if (engine_) {
      mod = engine_->moduli(t, edges);
      g = kernel_->value(t);
      big_g = kernel_->integral(t);
    }
    double diss = 0.0;
    if (dt > 0.0) {
      const int nc = u_.components;
      phi_eps(nc, config_.m, result_.epsilon, v_, phi_);
      const Eigen::MatrixXd a = a_.at(t);
      for (std::size_t n = 0; n < u_.nodes(); ++n) {
        Eigen::Map<const Eigen::VectorXd> p(phi_.data() + n * nc, nc);
        Eigen::Map<const Eigen::VectorXd> v(v_.data() + n * nc, nc);
        diss += v.dot(a * p);
      }
      diss *= u_.mesh.cell_volume();
    }
    tr.t.push_back(t);
    tr.g_circ.push_back(mod.g_circ);
    tr.g_prime_circ.push_back(mod.g_prime_circ);
    tr.grad_sq.push_back(grad_sq);
    tr.dissipation.push_back(diss);
    tr.g_value.push_back(g);
    tr.g_integral.push_back(big_g);
    tr.E.push_back(energy(mod.g_circ, grad_sq, big_g));
    if (engine_) engine_->push(t, u_);
    if (options_.keep_snapshots) result_.snapshots.push_back(u_);
  }

  const SolverConfig& config_;
  const std::optional<RelaxationKernel>& kernel_;
  const MatrixA& a_;
  const RunOptions& options_;
  Field u_;
  std::optional<MemoryEngine> engine_;
  std::vector<double> mem_, v_, phi_;
  RunResult result_;
};

}  // namespace

RunResult run(const Field& u0, const SolverConfig& config,
              const std::optional<RelaxationKernel>& kernel, const MatrixA& a,
              const RunOptions& options) {
  return Runner(u0, config, kernel, a, options).go();
}

}  // namespace memheat
