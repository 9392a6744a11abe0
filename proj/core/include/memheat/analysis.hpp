#pragma once

#include "memheat/kernel.hpp"
#include "memheat/trace.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace memheat {

/// Energy-identity check: centered E' against
///   -D - 1/2 g ||grad u||^2 + 1/2 (g' o grad u)
/// at interior stamps. D at a stamp is interpolated between the dissipation
/// of the two adjacent steps, weighted by their lengths.
struct DissipationResidual {
  double max_abs = 0.0;
  double max_rel = 0.0;  ///< max_abs / max |RHS|
  double at_time = 0.0;
  std::size_t samples = 0;
};

/// Interior stamps with t >= t_from only. Throws TooFewStamps with fewer
/// than 3 stamps.
DissipationResidual dissipation_residual(const EnergyTrace& trace, double t_from = 0.0);

/// coarse.max_abs / fine.max_abs.
double refinement_ratio(const DissipationResidual& coarse, const DissipationResidual& fine);
/// Same ratio with both residuals taken over t >= the coarse trace's first
/// interior stamp.
double refinement_ratio(const EnergyTrace& coarse, const EnergyTrace& fine);

/// Empirical k0 = sup xi(t) (g o grad u)(t) / (-E'(t))^{1/(2p-1)}. Stamps with
/// E' >= 0 or |E'| < 1e-13 E(0)/dt are excluded (dt the local step).
struct K0Result {
  double k0 = 0.0;
  double at_time = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;
};

/// Throws Indeterminate when every stamp is excluded.
K0Result k0_ratio(const EnergyTrace& trace, const KernelCertificate& certificate);

/// (1/k) sum f^{1/p} h <= ((1/k) sum f h)^{1/p} + 1e-12 with k = sum h and
/// equal quadrature weights. Throws InvalidParameter for k <= 0, p <= 1,
/// negative samples or mismatched lengths.
bool jensen_check(std::span<const double> f, std::span<const double> h, double p);

/// Both sides of the Jensen inequality, {lhs, rhs}.
std::pair<double, double> jensen_sides(std::span<const double> f, std::span<const double> h, double p);

enum class EnvelopeKind { Exponential, GeneralPolynomial, OptimalPolynomial };
std::string to_string(EnvelopeKind kind);

/// Tail window [start, end] of a trace.
struct Window {
  double start = 0.0;
  double end = 0.0;
};

/// Default [T/2, T].
Window default_tail(const EnergyTrace& trace);

struct DecayEnvelope {
  EnvelopeKind kind = EnvelopeKind::Exponential;
  double p = 1.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  /// min over the tail of 1 - E / (lambda0 * shape); negative means violated.
  double margin = 0.0;
  Window tail;
  std::optional<bool> integrable;  ///< set when p > 1
  /// Unit-amplitude envelope t -> shape(t); value(t) = lambda0 * shape(t).
  std::function<double(double)> shape;

  double value(double t) const { return lambda0 * shape(t); }
};

/// Chooses the form from p:
///   p = 1  exp(-lambda1 int_0^t xi), lambda1 = -slope of log E against int xi
///          over the tail
///   p > 1  (1 + int_0^t xi^p / xi(0)^p)^{-1/(p-1)} when the integrability
///          condition holds, else (1 + int_0^t xi^{2p-1} / xi(0)^{2p-1})^{-1/(2p-2)};
///          lambda1 = 1. Dividing by xi(0)^q only rescales time, so constant xi
///          gives exactly (1+t)^{-1/(p-1)}.
/// lambda0 is the smallest constant with E <= lambda0 * shape on the whole
/// trace. Without a certificate (no kernel) xi = 1 and p = 1.
DecayEnvelope envelope(const KernelCertificate* certificate, const EnergyTrace& trace,
                       std::optional<Window> tail = std::nullopt);

struct IntegrabilityResult {
  bool finite = false;
  bool analytic = false;         ///< decided by the closed-form tail rule
  double tail_exponent = 0.0;    ///< d log f / d log t of the integrand far out (t = 1e300, 1e6 for custom xi)
  bool numeric_agrees = true;    ///< partial-sum cross-check
  double partial_integral = 0.0; ///< int_0^{1e6} of the integrand
};

/// int_0^inf (1 + int_0^t xi^{2p-1})^{-1/(2p-2)} dt < inf ?
/// For xi = c (1+t)^-beta with q = 2p - 1: beta q < 1 gives an integrand
/// ~ t^{-(1 - beta q)/(2p-2)}, finite iff that exponent exceeds 1; beta q >= 1
/// or c = 0 leaves it bounded below, hence infinite. Custom xi are classified
/// from the numerically estimated tail exponent. Throws NotApplicable for p = 1.
IntegrabilityResult check_integrability(const KernelCertificate& certificate);

/// Trapezoid int_0^T E and the relative increment over the last doubling,
/// (I(T) - I(T/2)) / I(T/2) (0 when I(T/2) = 0).
struct EnergyIntegral {
  double integral = 0.0;
  double tail_increment = 0.0;
};
EnergyIntegral energy_integral(const EnergyTrace& trace);
/// Trapezoid int_0^t E with linear interpolation inside a step.
double energy_integral_to(const EnergyTrace& trace, double t);

enum class FitModel { PowerLaw, StretchedExponential };
std::string to_string(FitModel model);

/// PowerLaw:             log E = log C + exponent log(1+t);  params {C, exponent}
/// StretchedExponential: log E = log C - rate (1+t)^nu;      params {C, rate, nu}
/// residual is the max relative deviation |fit - E| / E over the window.
struct FitResult {
  FitModel model = FitModel::PowerLaw;
  double amplitude = 0.0;
  double exponent = 0.0;  ///< power law
  double rate = 0.0;      ///< stretched exponential
  double nu = 1.0;
  Window window;
  double residual = 0.0;
  std::size_t points = 0;
};

/// Least squares over the stamps inside the window. Throws NonpositiveEnergy
/// when E <= 0 there and TooFewStamps with fewer than 2 points.
FitResult fit_decay(const EnergyTrace& trace, FitModel model, Window window, double nu = 1.0);
FitResult fit_decay(std::span<const double> t, std::span<const double> e, FitModel model,
                    Window window, double nu = 1.0);

/// True when E(t_{k+1}) <= E(t_k) + tol * E(0) at every step; `worst` gets
/// the largest increase in units of E(0).
bool energy_monotone(const EnergyTrace& trace, double tol = 1e-10, double* worst = nullptr);

}  // namespace memheat
