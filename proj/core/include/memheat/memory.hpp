#pragma once

#include "memheat/kernel.hpp"
#include "memheat/mesh.hpp"

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace memheat {

/// Time-stamped history of one run. Each snapshot caches its Laplacian and
/// edge gradients, which is all the convolution and (g o grad u) need.
///
/// History quadrature: the stamps s_0 < s_1 < ... split [0, t] into intervals
/// [s_j, s_{j+1}] (the last one ending at the evaluation time t). Each interval
/// carries the value at its left stamp and the kernel at its midpoint age
/// t - (s_j + s_{j+1})/2.
class HistoryBuffer {
 public:
  HistoryBuffer(const Mesh& mesh, int components);

  /// Throws NonMonotoneTime unless t exceeds the last stamp.
  void push(double t, const Field& u);

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  double time(std::size_t j) const { return times_[j]; }
  double last_time() const { return times_.back(); }

  std::span<const double> laplacian(std::size_t j) const;
  std::span<const double> gradient(std::size_t j) const;
  /// Squared edge norm (already multiplied by the cell volume).
  double gradient_sq_norm(std::size_t j) const { return grad_sq_[j]; }

  /// Frees the cached fields of every snapshot before `j`. Their times stay.
  void release_before(std::size_t j);
  std::size_t first_retained() const noexcept { return base_; }

  const Mesh& mesh() const noexcept { return mesh_; }
  int components() const noexcept { return components_; }
  std::size_t node_dofs() const noexcept { return node_dofs_; }
  std::size_t edge_dofs() const noexcept { return edge_dofs_; }

 private:
  Mesh mesh_;
  int components_;
  std::size_t node_dofs_;
  std::size_t edge_dofs_;
  std::vector<double> times_;
  std::vector<double> grad_sq_;
  std::size_t base_ = 0;      // first snapshot whose fields are stored
  std::vector<double> lap_;   // snapshots [base_, size) contiguous
  std::vector<double> grad_;
};

/// int_0^t g(t - s) Lap u(s) ds by the product rectangle rule. t must not
/// precede the last stamp; an empty buffer yields the zero field.
Field memory_convolution(const HistoryBuffer& buffer, const RelaxationKernel& kernel, double t);

/// (g o grad u)(t) = int_0^t g(t - tau) ||grad u(t) - grad u(tau)||^2 dtau
/// using cached edge gradients; `current` is the field at time t.
double g_circ_grad(const HistoryBuffer& buffer, const RelaxationKernel& kernel, double t,
                   const Field& current);

/// Both memory moduli, (g o grad u) and (g' o grad u), from one sweep.
struct MemoryModuli {
  double g_circ = 0.0;
  double g_prime_circ = 0.0;
};

struct ExpMode {
  double weight = 0.0;
  double rate = 0.0;
};

/// Sum-of-exponentials approximation g(t) ~ sum_j w_j exp(-r_j (t - t_w)) on
/// [t_w, horizon], t_w = window_start. Referencing the window start keeps the
/// weights O(g(t_w)) however fast the modes are.
struct CompressedKernel {
  std::vector<ExpMode> modes;
  double window_start = 0.0;
  double horizon = 0.0;
  double max_rel_error = 0.0;   ///< sup |g~ - g| / g on a dense check grid
  double max_abs_error = 0.0;   ///< sup |g~ - g| on the same grid

  double value(double t) const;
  double derivative(double t) const;
};

/// Least-squares fit of the kernel on log-spaced nodes in [window_start, T]
/// with relative weighting (variable projection over log-rates, Lawson
/// reweighting towards minimax). PureExp kernels compress exactly to one mode.
/// Throws InvalidParameter for K < 1 or a bad window and CompressionFailed
/// when the relative sup error exceeds tol.
CompressedKernel compress_kernel(const RelaxationKernel& kernel, double horizon, int modes,
                                 double tol, double window_start = 0.0);

/// Memory term of one run: owns the history and evaluates the convolution and
/// the moduli. Without a compressed kernel every interval is summed directly.
/// With one, intervals whose midpoint age reaches the kernel's window_start
/// are folded into per-mode running sums and their snapshots released, so the
/// per-step cost is O(K) plus the recent window.
class MemoryEngine {
 public:
  MemoryEngine(const Mesh& mesh, int components, RelaxationKernel kernel,
               std::optional<CompressedKernel> compressed = std::nullopt);

  void push(double t, const Field& u);
  /// Writes the convolution at time t into `out` (node dofs).
  void convolution(double t, std::span<double> out);
  /// Moduli at time t for the current edge gradients.
  MemoryModuli moduli(double t, std::span<const double> current_edges);

  const HistoryBuffer& history() const noexcept { return history_; }
  bool compressed() const noexcept { return compressed_.has_value(); }
  std::size_t folded_intervals() const noexcept { return folded_; }

 private:
  void fold(double t);

  HistoryBuffer history_;
  RelaxationKernel kernel_;
  std::optional<CompressedKernel> compressed_;
  double near_field_ = std::numeric_limits<double>::infinity();

  // Running sums referenced to time t_ref_, one block per mode.
  std::size_t folded_ = 0;  // intervals [0, folded_) live in the sums
  double t_ref_ = 0.0;
  std::vector<double> conv_sum_;  // K x node dofs
  std::vector<double> grad_sum_;  // K x edge dofs
  std::vector<double> mass_sum_;  // K
  std::vector<double> sq_sum_;    // K
};

}  // namespace memheat
