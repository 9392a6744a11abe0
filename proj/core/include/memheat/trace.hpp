#pragma once

#include <cstddef>
#include <vector>

namespace memheat {

/// Per-stamp record of one run, stored column-wise.
///   E            energy 1/2 (g o grad u) + 1/2 (1 - int_0^t g) ||grad u||^2
///   g_circ       (g o grad u)
///   g_prime_circ (g' o grad u)
///   grad_sq      ||grad u||^2
///   dissipation  int (A Phi(u_t)) . u_t over the step ending at the stamp
///                (0 at the initial stamp)
///   g_value      g(t), 0 without a kernel
///   g_integral   int_0^t g
struct EnergyTrace {
  std::vector<double> t;
  std::vector<double> E;
  std::vector<double> g_circ;
  std::vector<double> g_prime_circ;
  std::vector<double> grad_sq;
  std::vector<double> dissipation;
  std::vector<double> g_value;
  std::vector<double> g_integral;

  std::size_t size() const noexcept { return t.size(); }
  bool empty() const noexcept { return t.empty(); }
  void reserve(std::size_t n);
};

/// E = 1/2 g_circ + 1/2 (1 - G) grad_sq with G = int_0^t g.
double energy(double g_circ, double grad_sq, double g_integral);

}  // namespace memheat
