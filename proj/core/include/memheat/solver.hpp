#pragma once

#include "memheat/kernel.hpp"
#include "memheat/memory.hpp"
#include "memheat/mesh.hpp"
#include "memheat/trace.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace memheat {

/// Damping matrix A(t) acting on the velocity components.
class MatrixA {
 public:
  enum class Mode { Identity, Constant, TimeVarying };

  static MatrixA identity(int components, double c0 = 1.0);
  static MatrixA constant(Eigen::MatrixXd a, double c0);
  static MatrixA time_varying(int components, std::function<Eigen::MatrixXd(double)> a, double c0);

  Mode mode() const noexcept { return mode_; }
  int components() const noexcept { return nc_; }
  double c0() const noexcept { return c0_; }
  Eigen::MatrixXd at(double t) const;

  /// Smallest eigenvalue of the symmetric part of A(t).
  double coercivity(double t) const;
  /// Throws Coercivity unless (A(t)v, v) >= c0 |v|^2 at every sampled t.
  void validate(std::span<const double> sample_times) const;

 private:
  Mode mode_ = Mode::Identity;
  int nc_ = 1;
  double c0_ = 1.0;
  Eigen::MatrixXd constant_;
  std::function<Eigen::MatrixXd(double)> fn_;
};

struct TimeMesh {
  enum class Kind { Uniform, Geometric };
  Kind kind = Kind::Uniform;
  double ratio = 1.0;  ///< step growth factor for Geometric
};

struct SolverConfig {
  double m = 2.0;
  double dt = 1e-2;           ///< first (or every) step
  double t_final = 1.0;
  TimeMesh time_mesh;
  double newton_tol = 1e-10;  ///< on ||F||_inf relative to ||Lap u^k||_inf + ||M||_inf
  int newton_max_iter = 50;
  double epsilon = 1e-8;      ///< regularisation, relative to the velocity scale
};

/// Throws HypothesisG3 for m < 2, InvalidParameter for a bad schedule.
void validate(const SolverConfig& config, int dim);

/// Stamps 0 = t_0 < t_1 < ... < t_N = T. The last step is shortened to land
/// on T (a sliver under 1e-9 dt is merged into the previous step).
std::vector<double> make_time_stamps(const SolverConfig& config);

/// Phi_eps(v) = (|v|^2 + eps^2)^{(m-2)/2} v per node; exactly v for m = 2.
void phi_eps(int nc, double m, double eps, std::span<const double> v, std::span<double> out);

/// Absolute epsilon: config.epsilon * (max |Lap_h u0|)^{1/(m-1)}.
double regularisation(const SolverConfig& config, const Field& u0);

struct StepStats {
  int newton_iterations = 0;
  double residual = 0.0;
};

/// One implicit step: returns U solving
///   A(t_next) Phi_eps((U - u)/dt) - Lap_h U + memory = 0
/// by damped Newton in the velocity v = (U - u)/dt, starting from `guess`
/// (zero when empty). Throws StepFailed when Newton does not converge and
/// Coercivity when an iterate violates (A v, v) >= c0 |v|^2.
Field step(const Field& u, double t_next, double dt, std::span<const double> memory,
           const SolverConfig& config, const MatrixA& a, double eps,
           std::span<const double> guess = {}, StepStats* stats = nullptr);

struct RunOptions {
  std::optional<CompressedKernel> compressed;
  bool keep_snapshots = false;
};

struct RunResult {
  EnergyTrace trace;
  Field final_state;
  std::vector<Field> snapshots;  ///< one per stamp when requested
  double epsilon = 0.0;          ///< absolute regularisation used
  long newton_iterations = 0;
  int halvings = 0;
  std::size_t folded_intervals = 0;
};

/// Advances u0 over the configured stamps. Without a kernel the memory term
/// is absent (g = 0). Deterministic: identical inputs give a bit-identical
/// trace. A step whose Newton iteration fails is retried once as two half
/// steps (both recorded); a second failure propagates StepFailed.
RunResult run(const Field& u0, const SolverConfig& config,
              const std::optional<RelaxationKernel>& kernel, const MatrixA& a,
              const RunOptions& options = {});

}  // namespace memheat
