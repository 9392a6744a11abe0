#include "memheat/memory.hpp"

#include "memheat/error.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace memheat {

namespace {

constexpr int kFitNodes = 160;
constexpr int kCheckNodes = 4000;
constexpr int kLawsonRounds = 3;

// Nodes uniform in log(1 + t - t0), so both the short-time curvature and the
// long tail are resolved.
std::vector<double> fit_grid(double t0, double t1, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  const double span = std::log1p(t1 - t0);
  for (int i = 0; i < n; ++i) t[i] = t0 + std::expm1(span * i / (n - 1));
  t.back() = t1;
  return t;
}

// Variable projection: for fixed log-rates the weights solve a weighted
// linear least-squares problem on relative residuals, so only the rates
// are iterated on.
struct VarPro {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const std::vector<double>* t = nullptr;
  const std::vector<double>* log_g = nullptr;
  Eigen::VectorXd sqrt_omega;
  double lo = 0.0, hi = 0.0;  // log-rate clamp

  int inputs() const { return static_cast<int>(k); }
  int values() const { return static_cast<int>(t->size()); }
  Eigen::Index k = 0;

  Eigen::VectorXd rates(const Eigen::VectorXd& x) const {
    Eigen::VectorXd r(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) r[j] = std::exp(std::clamp(x[j], lo, hi));
    return r;
  }

  Eigen::MatrixXd basis(const Eigen::VectorXd& r) const {
    const auto n = static_cast<Eigen::Index>(t->size());
    Eigen::MatrixXd b(n, r.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < r.size(); ++j) {
        b(i, j) = std::exp(-r[j] * ((*t)[i] - (*t)[0]) - (*log_g)[i]);
      }
    }
    return b;
  }

  Eigen::VectorXd weights(const Eigen::MatrixXd& b) const {
    const Eigen::MatrixXd bw = sqrt_omega.asDiagonal() * b;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(bw);
    cod.setThreshold(1e-15);
    return cod.solve(sqrt_omega);
  }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    const Eigen::MatrixXd b = basis(rates(x));
    const Eigen::VectorXd w = weights(b);
    f = sqrt_omega.cwiseProduct(b * w - Eigen::VectorXd::Ones(b.rows()));
    if (!f.allFinite()) f.setConstant(1e6);
    return 0;
  }
};

struct Candidate {
  std::vector<ExpMode> modes;
  double max_rel = std::numeric_limits<double>::infinity();
  double max_abs = std::numeric_limits<double>::infinity();
};

Candidate evaluate(const RelaxationKernel& kernel, const std::vector<ExpMode>& modes,
                   const std::vector<double>& check) {
  Candidate c;
  c.modes = modes;
  c.max_rel = 0.0;
  c.max_abs = 0.0;
  for (double t : check) {
    double s = 0.0;
    for (const auto& m : modes) s += m.weight * std::exp(-m.rate * (t - check.front()));
    const double g = kernel.value(t);
    const double err = std::abs(s - g);
    c.max_abs = std::max(c.max_abs, err);
    c.max_rel = std::max(c.max_rel, err / g);
  }
  if (!std::isfinite(c.max_rel)) c.max_rel = c.max_abs = std::numeric_limits<double>::infinity();
  return c;
}

std::vector<ExpMode> fit_from(VarPro& f, Eigen::VectorXd x) {
  const Eigen::Index n = f.values();
  f.sqrt_omega = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd omega = Eigen::VectorXd::Ones(n);
  for (int round = 0; round <= kLawsonRounds; ++round) {
    Eigen::NumericalDiff<VarPro> diff(f);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<VarPro>> lm(diff);
    lm.parameters.maxfev = round == 0 ? 2000 : 400;
    lm.parameters.xtol = 1e-12;
    lm.parameters.ftol = 1e-14;
    lm.minimize(x);
    if (round == kLawsonRounds) break;
    // Lawson step: push weight towards the nodes carrying the largest error.
    const Eigen::MatrixXd b = f.basis(f.rates(x));
    const Eigen::VectorXd e = (b * f.weights(b) - Eigen::VectorXd::Ones(n)).cwiseAbs();
    const double emax = e.maxCoeff();
    if (!(emax > 0.0) || !std::isfinite(emax)) break;
    omega = omega.cwiseProduct((Eigen::VectorXd::Ones(n) + 2.0 * e / emax));
    omega /= omega.mean();
    f.sqrt_omega = omega.cwiseSqrt();
  }
  const Eigen::VectorXd r = f.rates(x);
  const Eigen::VectorXd w = f.weights(f.basis(r));
  std::vector<ExpMode> modes;
  for (Eigen::Index j = 0; j < r.size(); ++j) modes.push_back({w[j], r[j]});
  std::sort(modes.begin(), modes.end(),
            [](const ExpMode& a, const ExpMode& b) { return a.rate < b.rate; });
  return modes;
}

}  // namespace

CompressedKernel compress_kernel(const RelaxationKernel& kernel, double horizon, int modes,
                                 double tol, double window_start) {
  if (modes < 1) {
    throw Error(ErrorKind::InvalidParameter, "compression needs K >= 1 modes");
  }
  if (!(window_start >= 0.0) || !(horizon > window_start) || !std::isfinite(horizon)) {
    throw Error(ErrorKind::InvalidParameter, "compression window must satisfy 0 <= start < T");
  }
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "compression tolerance must be positive");

  CompressedKernel out;
  out.window_start = window_start;
  out.horizon = horizon;
  const auto check = fit_grid(window_start, horizon, kCheckNodes);

  Candidate best;
  if (kernel.family() == KernelFamily::PureExp) {
    const auto& p = kernel.params();
    best = evaluate(kernel, {{p.a * std::exp(-p.b * window_start), p.b}}, check);
  } else {
    const auto nodes = fit_grid(window_start, horizon, kFitNodes);
    std::vector<double> log_g(nodes.size());
    double steepest = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      log_g[i] = kernel.log_value(nodes[i]);
      steepest = std::max(steepest, -kernel.derivative(nodes[i]) / kernel.value(nodes[i]));
    }
    const double scale = horizon - window_start;
    VarPro f;
    f.t = &nodes;
    f.log_g = &log_g;
    f.k = modes;
    f.lo = std::log(1e-3 / scale);
    f.hi = std::log(std::max(1e3, 100.0 * steepest));

    const double slow = std::log(0.5 / scale);
    const double starts[] = {steepest, 4.0 * steepest, 16.0 * steepest, 20.0};
    for (double fast : starts) {
      if (!(fast > 0.0) || !std::isfinite(fast)) continue;
      Eigen::VectorXd x(modes);
      const double top = std::max(std::log(fast), slow + 1.0);
      for (int j = 0; j < modes; ++j) {
        x[j] = modes == 1 ? slow : slow + (top - slow) * j / (modes - 1);
      }
      VarPro trial = f;
      Candidate c = evaluate(kernel, fit_from(trial, x), check);
      if (c.max_rel < best.max_rel) best = std::move(c);
      if (best.max_rel <= 0.1 * tol) break;
    }
  }

  out.modes = best.modes;
  out.max_rel_error = best.max_rel;
  out.max_abs_error = best.max_abs;
  for (const auto& m : out.modes) {
    if (!(m.rate > 0.0) || !std::isfinite(m.weight)) {
      throw Error(ErrorKind::CompressionFailed, "fit produced a nonpositive rate");
    }
  }
  if (!(out.max_rel_error <= tol)) {
    std::ostringstream os;
    os << "sum-of-exponentials fit with K = " << modes << " reaches relative error "
       << out.max_rel_error << " > tol " << tol << " on [" << window_start << ", " << horizon
       << "]";
    throw Error(ErrorKind::CompressionFailed, os.str());
  }
  return out;
}

}  // namespace memheat
