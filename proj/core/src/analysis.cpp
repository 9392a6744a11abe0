#include "memheat/analysis.hpp"

#include "memheat/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace memheat {

double energy(double g_circ, double grad_sq, double g_integral) {
  return 0.5 * g_circ + 0.5 * (1.0 - g_integral) * grad_sq;
}

DissipationResidual dissipation_residual(const EnergyTrace& tr, double t_from) {
  const std::size_t n = tr.size();
  if (n < 3) throw Error(ErrorKind::TooFewStamps, "dissipation residual needs >= 3 stamps");
  DissipationResidual out;
  double rhs_scale = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (tr.t[k] < t_from) continue;
    const double dl = tr.t[k] - tr.t[k - 1];
    const double dr = tr.t[k + 1] - tr.t[k];
    const double de = (tr.E[k + 1] - tr.E[k - 1]) / (dl + dr);
    const double d = (dl * tr.dissipation[k] + dr * tr.dissipation[k + 1]) / (dl + dr);
    const double rhs = -d - 0.5 * tr.g_value[k] * tr.grad_sq[k] + 0.5 * tr.g_prime_circ[k];
    const double r = std::abs(de - rhs);
    rhs_scale = std::max(rhs_scale, std::abs(rhs));
    if (r > out.max_abs) {
      out.max_abs = r;
      out.at_time = tr.t[k];
    }
    ++out.samples;
  }
  out.max_rel = rhs_scale > 0.0 ? out.max_abs / rhs_scale : 0.0;
  return out;
}

double refinement_ratio(const EnergyTrace& coarse, const EnergyTrace& fine) {
  const DissipationResidual c = dissipation_residual(coarse);
  if (c.samples == 0) throw Error(ErrorKind::TooFewStamps, "no interior stamps");
  // Fine stamps before the first coarse interior stamp have no coarse
  // counterpart; comparing over a common window keeps the start-up layer
  // from being sampled at different times on the two levels.
  return refinement_ratio(c, dissipation_residual(fine, coarse.t[1]));
}

double refinement_ratio(const DissipationResidual& coarse, const DissipationResidual& fine) {
  if (fine.max_abs == 0.0) return coarse.max_abs == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return coarse.max_abs / fine.max_abs;
}

// ---------------------------------------------------------------------------

K0Result k0_ratio(const EnergyTrace& tr, const KernelCertificate& cert) {
  const std::size_t n = tr.size();
  K0Result out;
  if (n < 2) throw Error(ErrorKind::Indeterminate, "trace too short for E'");
  const double e0 = tr.E.front();
  const double power = 1.0 / (2.0 * cert.p() - 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 < n ? k + 1 : k;
    const double span = tr.t[hi] - tr.t[lo];
    const double de = (tr.E[hi] - tr.E[lo]) / span;
    const double local_dt = k == 0 || k + 1 == n ? span : 0.5 * span;
    if (!(de < 0.0) || std::abs(de) < 1e-13 * e0 / local_dt) {
      ++out.excluded;
      continue;
    }
    ++out.used;
    const double ratio = cert.xi(tr.t[k]) * tr.g_circ[k] / std::pow(-de, power);
    if (ratio > out.k0) {
      out.k0 = ratio;
      out.at_time = tr.t[k];
    }
  }
  if (out.used == 0) {
    throw Error(ErrorKind::Indeterminate, "every stamp falls under the E' exclusion floor");
  }
  return out;
}

// ---------------------------------------------------------------------------

std::pair<double, double> jensen_sides(std::span<const double> f, std::span<const double> h, double p) {
  if (f.size() != h.size()) throw Error(ErrorKind::ShapeMismatch, "f and h differ in length");
  if (!(p > 1.0)) throw Error(ErrorKind::InvalidParameter, "Jensen check needs p > 1");
  double k = 0.0, lhs = 0.0, fh = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < 0.0 || h[i] < 0.0) {
      throw Error(ErrorKind::InvalidParameter, "Jensen check needs f, h >= 0");
    }
    k += h[i];
    lhs += std::pow(f[i], 1.0 / p) * h[i];
    fh += f[i] * h[i];
  }
  if (!(k > 0.0)) throw Error(ErrorKind::InvalidParameter, "Jensen check needs int h > 0");
  return {lhs / k, std::pow(fh / k, 1.0 / p)};
}

bool jensen_check(std::span<const double> f, std::span<const double> h, double p) {
  const auto [lhs, rhs] = jensen_sides(f, h, p);
  return lhs <= rhs + 1e-12;
}

// ---------------------------------------------------------------------------

std::string to_string(EnvelopeKind kind) {
  switch (kind) {
    case EnvelopeKind::Exponential: return "Exponential";
    case EnvelopeKind::GeneralPolynomial: return "GeneralPolynomial";
    case EnvelopeKind::OptimalPolynomial: return "OptimalPolynomial";
  }
  return "unknown";
}

Window default_tail(const EnergyTrace& trace) {
  if (trace.empty()) return {};
  const double t_end = trace.t.back();
  return {0.5 * t_end, t_end};
}

namespace {

// Least-squares line y = c0 + c1 x.
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return {my - slope * mx, slope};
}

bool in_window(double t, const Window& w) { return t >= w.start && t <= w.end; }

// xi(0)^q, so that int_0^t xi^q / unit grows like t near the origin. Any
// positive constant leaves the envelope's decay order unchanged.
double time_unit(const KernelCertificate& cert, double q) {
  const double u = std::pow(cert.xi(0.0), q);
  return u > 0.0 && std::isfinite(u) ? u : 1.0;
}

}  // namespace

DecayEnvelope envelope(const KernelCertificate* cert, const EnergyTrace& tr, std::optional<Window> tail) {
  if (tr.empty()) throw Error(ErrorKind::TooFewStamps, "envelope of an empty trace");
  DecayEnvelope env;
  env.tail = tail.value_or(default_tail(tr));
  env.p = cert ? cert->p() : 1.0;

  // log of the unit envelope, kept in log form so late stamps do not underflow
  std::function<double(double)> log_shape;
  if (env.p == 1.0) {
    env.kind = EnvelopeKind::Exponential;
    auto xi_int = [cert](double t) { return cert ? cert->xi_power_integral(1.0, t) : t; };
    std::vector<double> x, y;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      if (in_window(tr.t[k], env.tail) && tr.E[k] > 0.0) {
        x.push_back(xi_int(tr.t[k]));
        y.push_back(std::log(tr.E[k]));
      }
    }
    env.lambda1 = x.size() >= 2 ? -line_fit(x, y).second : 0.0;
    const double l1 = env.lambda1;
    log_shape = [xi_int, l1](double t) { return -l1 * xi_int(t); };
  } else {
    const double p = env.p;
    env.lambda1 = 1.0;
    const bool finite = check_integrability(*cert).finite;
    env.integrable = finite;
    if (finite) {
      env.kind = EnvelopeKind::OptimalPolynomial;
      const double unit = time_unit(*cert, p);
      log_shape = [cert, p, unit](double t) {
        return -std::log1p(cert->xi_power_integral(p, t) / unit) / (p - 1.0);
      };
    } else {
      env.kind = EnvelopeKind::GeneralPolynomial;
      const double unit = time_unit(*cert, 2.0 * p - 1.0);
      log_shape = [cert, p, unit](double t) {
        return -std::log1p(cert->xi_power_integral(2.0 * p - 1.0, t) / unit) / (2.0 * p - 2.0);
      };
    }
  }

  double log_l0 = -std::numeric_limits<double>::infinity();
  std::vector<double> ls(tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k) {
    ls[k] = log_shape(tr.t[k]);
    if (tr.E[k] > 0.0) log_l0 = std::max(log_l0, std::log(tr.E[k]) - ls[k]);
  }
  env.lambda0 = std::isfinite(log_l0) ? std::exp(log_l0) : 0.0;
  env.margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < tr.size(); ++k) {
    if (!in_window(tr.t[k], env.tail)) continue;
    // (log E - log shape) - log lambda0 is <= 0 exactly, so rounding cannot push
    // the margin below zero.
    const double ratio = tr.E[k] > 0.0 ? std::exp((std::log(tr.E[k]) - ls[k]) - log_l0) : 0.0;
    env.margin = std::min(env.margin, 1.0 - ratio);
  }
  if (!std::isfinite(env.margin)) env.margin = 1.0;
  env.shape = [log_shape](double t) { return std::exp(log_shape(t)); };
  return env;
}

// ---------------------------------------------------------------------------

IntegrabilityResult check_integrability(const KernelCertificate& cert) {
  const double p = cert.p();
  if (!(p > 1.0)) throw Error(ErrorKind::NotApplicable, "integrability condition needs p > 1");
  const double q = 2.0 * p - 1.0;
  const double power = 1.0 / (2.0 * p - 2.0);
  auto integrand = [&](double t) { return std::pow(1.0 + cert.xi_power_integral(q, t), -power); };

  IntegrabilityResult out;
  // Local log-slope d log f / d log t = -power t xi^q / (1 + int xi^q). When
  // int xi^q grows slowly the slope only settles at enormous t, so closed-form
  // xi are probed out to 1e300; quadrature-backed custom xi stop at 1e6.
  const XiForm& form = cert.xi_form();
  const double t_probe = form.kind == XiForm::Kind::Custom ? 1e6 : 1e300;
  out.tail_exponent = -power * t_probe * std::pow(cert.xi(t_probe), q) /
                      (1.0 + cert.xi_power_integral(q, t_probe));
  const bool numeric_finite = out.tail_exponent < -1.0;
  const double t2 = 1e6;
  double total = 0.0;
  double lo = 0.0;
  for (double hi = 1.0; hi <= t2; hi *= 10.0) {
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 10, 1e-10);
    lo = hi;
  }
  out.partial_integral = total;

  if (form.kind == XiForm::Kind::Custom) {
    out.finite = numeric_finite;
    out.analytic = false;
    return out;
  }
  out.analytic = true;
  const double beta = form.kind == XiForm::Kind::Constant ? 0.0 : form.exponent;
  if (form.coefficient == 0.0 || beta * q >= 1.0) {
    out.finite = false;
  } else {
    out.finite = (1.0 - beta * q) * power > 1.0;
  }
  out.numeric_agrees = out.finite == numeric_finite;
  return out;
}

// ---------------------------------------------------------------------------

double energy_integral_to(const EnergyTrace& tr, double t) {
  double s = 0.0;
  for (std::size_t k = 1; k < tr.size(); ++k) {
    const double a = tr.t[k - 1], b = tr.t[k];
    if (a >= t) break;
    if (b <= t) {
      s += 0.5 * (b - a) * (tr.E[k - 1] + tr.E[k]);
    } else {
      const double w = (t - a) / (b - a);
      const double et = tr.E[k - 1] + w * (tr.E[k] - tr.E[k - 1]);
      s += 0.5 * (t - a) * (tr.E[k - 1] + et);
    }
  }
  return s;
}

EnergyIntegral energy_integral(const EnergyTrace& tr) {
  EnergyIntegral out;
  if (tr.size() < 2) return out;
  const double t_end = tr.t.back();
  out.integral = energy_integral_to(tr, t_end);
  const double half = energy_integral_to(tr, 0.5 * t_end);
  out.tail_increment = half > 0.0 ? (out.integral - half) / half : 0.0;
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(FitModel model) {
  return model == FitModel::PowerLaw ? "power_law" : "stretched_exp";
}

FitResult fit_decay(std::span<const double> t, std::span<const double> e, FitModel model,
                    Window window, double nu) {
  if (t.size() != e.size()) throw Error(ErrorKind::ShapeMismatch, "t and E differ in length");
  std::vector<double> x, y;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!in_window(t[k], window)) continue;
    if (!(e[k] > 0.0)) {
      std::ostringstream os;
      os << "E = " << e[k] << " at t = " << t[k] << " inside the fit window";
      throw Error(ErrorKind::NonpositiveEnergy, os.str());
    }
    x.push_back(model == FitModel::PowerLaw ? std::log1p(t[k]) : std::pow(1.0 + t[k], nu));
    y.push_back(std::log(e[k]));
  }
  if (x.size() < 2) throw Error(ErrorKind::TooFewStamps, "fit window holds fewer than 2 stamps");
  const auto [c0, c1] = line_fit(x, y);
  FitResult out;
  out.model = model;
  out.window = window;
  out.points = x.size();
  out.amplitude = std::exp(c0);
  out.nu = nu;
  if (model == FitModel::PowerLaw) {
    out.exponent = c1;
  } else {
    out.rate = -c1;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.residual = std::max(out.residual, std::abs(std::expm1(c0 + c1 * x[i] - y[i])));
  }
  return out;
}

FitResult fit_decay(const EnergyTrace& trace, FitModel model, Window window, double nu) {
  return fit_decay(trace.t, trace.E, model, window, nu);
}

bool energy_monotone(const EnergyTrace& tr, double tol, double* worst) {
  double w = 0.0;
  bool ok = true;
  const double e0 = tr.empty() ? 0.0 : tr.E.front();
  for (std::size_t k = 1; k < tr.size(); ++k) {
    const double rise = tr.E[k] - tr.E[k - 1];
    if (rise > tol * e0) ok = false;
    if (e0 > 0.0) w = std::max(w, rise / e0);
  }
  if (worst) *worst = w;
  return ok;
}

}  // namespace memheat
