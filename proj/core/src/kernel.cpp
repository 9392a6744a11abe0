#include "memheat/kernel.hpp"

#include "memheat/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace memheat {

namespace {

constexpr double kTailCutRatio = 1e-14;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidParameter,
                std::string(name) + " must be positive and finite, got " + std::to_string(v));
  }
}

// Three-point second-order derivative on a nonuniform grid.
std::vector<double> nodal_derivative(const std::vector<double>& t, const std::vector<double>& g) {
  const std::size_t n = t.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t i0, i1, i2;
    if (i == 0) {
      i0 = 0; i1 = 1; i2 = 2;
    } else if (i + 1 == n) {
      i0 = n - 3; i1 = n - 2; i2 = n - 1;
    } else {
      i0 = i - 1; i1 = i; i2 = i + 1;
    }
    const double x = t[i];
    const double x0 = t[i0], x1 = t[i1], x2 = t[i2];
    // Derivative of the Lagrange interpolant through the three nodes.
    const double l0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
    const double l1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
    const double l2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
    d[i] = l0 * g[i0] + l1 * g[i1] + l2 * g[i2];
  }
  return d;
}

double gk_integrate(const std::function<double(double)>& f, double lo, double hi, double* err) {
  double e = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20,
                                                                                1e-14, &e);
  if (err) *err += e;
  return v;
}

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::PowerLaw: return "power_law";
    case KernelFamily::StretchedExp: return "stretched_exp";
    case KernelFamily::PureExp: return "pure_exp";
    case KernelFamily::Tabulated: return "tabulated";
  }
  return "unknown";
}

RelaxationKernel make_kernel(KernelFamily family, const KernelParams& params) {
  RelaxationKernel k;
  k.family_ = family;
  k.params_ = params;
  switch (family) {
    case KernelFamily::PowerLaw:
      require_positive(params.a, "a");
      require_positive(params.nu, "nu");
      if (params.nu <= 1.0) {
        throw Error(ErrorKind::DivergentMass,
                    "power-law kernel needs nu > 1 for finite mass, got " + std::to_string(params.nu));
      }
      break;
    case KernelFamily::StretchedExp:
      require_positive(params.a, "a");
      require_positive(params.b, "b");
      require_positive(params.alpha, "alpha");
      break;
    case KernelFamily::PureExp:
      require_positive(params.a, "a");
      require_positive(params.b, "b");
      break;
    case KernelFamily::Tabulated: {
      const auto& t = params.sample_t;
      const auto& g = params.sample_g;
      if (t.size() < 3 || t.size() != g.size()) {
        throw Error(ErrorKind::InvalidParameter, "tabulated kernel needs >= 3 (t, g) samples");
      }
      if (t.front() != 0.0) {
        throw Error(ErrorKind::InvalidParameter, "tabulated kernel must start at t = 0");
      }
      for (std::size_t i = 0; i < t.size(); ++i) {
        require_positive(g[i], "g sample");
        if (i > 0 && !(t[i] > t[i - 1])) {
          throw Error(ErrorKind::InvalidParameter, "tabulated sample times must increase");
        }
        if (i > 0 && g[i] > g[i - 1]) {
          throw Error(ErrorKind::InvalidParameter, "tabulated kernel must be nonincreasing");
        }
      }
      if (!(g[g.size() - 1] < g[g.size() - 2])) {
        throw Error(ErrorKind::DivergentMass, "tabulated kernel must strictly decay on its last segment");
      }
      k.tab_dg_ = nodal_derivative(t, g);
      k.tab_cum_.assign(t.size(), 0.0);
      for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double dt = t[i + 1] - t[i];
        const double r = k.tab_rate(i);
        const double seg = r > 0.0 ? g[i] * -std::expm1(-r * dt) / r : g[i] * dt;
        k.tab_cum_[i + 1] = k.tab_cum_[i] + seg;
      }
      break;
    }
  }
  return k;
}

double RelaxationKernel::tab_rate(std::size_t segment) const {
  const auto& t = params_.sample_t;
  const auto& g = params_.sample_g;
  return (std::log(g[segment]) - std::log(g[segment + 1])) / (t[segment + 1] - t[segment]);
}

double RelaxationKernel::value(double t) const {
  const auto& p = params_;
  switch (family_) {
    case KernelFamily::PowerLaw: return p.a * std::pow(1.0 + t, -p.nu);
    case KernelFamily::StretchedExp: return p.a * std::exp(-p.b * std::pow(1.0 + t, p.alpha));
    case KernelFamily::PureExp: return p.a * std::exp(-p.b * t);
    case KernelFamily::Tabulated: return std::exp(log_value(t));
  }
  return 0.0;
}

double RelaxationKernel::log_value(double t) const {
  const auto& p = params_;
  switch (family_) {
    case KernelFamily::PowerLaw: return std::log(p.a) - p.nu * std::log1p(t);
    case KernelFamily::StretchedExp: return std::log(p.a) - p.b * std::pow(1.0 + t, p.alpha);
    case KernelFamily::PureExp: return std::log(p.a) - p.b * t;
    case KernelFamily::Tabulated: {
      const auto& ts = p.sample_t;
      const auto& gs = p.sample_g;
      if (t <= 0.0) return std::log(gs.front());
      auto it = std::upper_bound(ts.begin(), ts.end(), t);
      std::size_t seg = it == ts.end() ? ts.size() - 2 : static_cast<std::size_t>(it - ts.begin()) - 1;
      return std::log(gs[seg]) - tab_rate(seg) * (t - ts[seg]);
    }
  }
  return 0.0;
}

double RelaxationKernel::derivative(double t) const {
  const auto& p = params_;
  switch (family_) {
    case KernelFamily::PowerLaw: return -p.a * p.nu * std::pow(1.0 + t, -p.nu - 1.0);
    case KernelFamily::StretchedExp:
      return -p.b * p.alpha * std::pow(1.0 + t, p.alpha - 1.0) * value(t);
    case KernelFamily::PureExp: return -p.b * value(t);
    case KernelFamily::Tabulated: {
      const auto& ts = p.sample_t;
      if (t >= ts.back()) return -tab_rate(ts.size() - 2) * value(t);
      if (t <= 0.0) return tab_dg_.front();
      auto it = std::upper_bound(ts.begin(), ts.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
      const double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
      return (1.0 - w) * tab_dg_[i] + w * tab_dg_[i + 1];
    }
  }
  return 0.0;
}

std::pair<double, double> RelaxationKernel::value_and_derivative(double t) const {
  const auto& p = params_;
  switch (family_) {
    case KernelFamily::PowerLaw: {
      const double g = p.a * std::pow(1.0 + t, -p.nu);
      return {g, -p.nu * g / (1.0 + t)};
    }
    case KernelFamily::StretchedExp: {
      const double q = std::pow(1.0 + t, p.alpha);
      const double g = p.a * std::exp(-p.b * q);
      return {g, -p.b * p.alpha * q / (1.0 + t) * g};
    }
    case KernelFamily::PureExp: {
      const double g = p.a * std::exp(-p.b * t);
      return {g, -p.b * g};
    }
    case KernelFamily::Tabulated: return {value(t), derivative(t)};
  }
  return {0.0, 0.0};
}

double RelaxationKernel::integral(double t) const {
  if (t <= 0.0) return 0.0;
  const auto& p = params_;
  switch (family_) {
    case KernelFamily::PowerLaw:
      return p.a / (p.nu - 1.0) * -std::expm1((1.0 - p.nu) * std::log1p(t));
    case KernelFamily::StretchedExp: {
      const double s = 1.0 / p.alpha;
      const double scale = p.a / (p.alpha * std::pow(p.b, s));
      const double upper0 = boost::math::tgamma(s, p.b);
      const double upper_t = boost::math::tgamma(s, p.b * std::pow(1.0 + t, p.alpha));
      return scale * (upper0 - upper_t);
    }
    case KernelFamily::PureExp: return p.a / p.b * -std::expm1(-p.b * t);
    case KernelFamily::Tabulated: {
      const auto& ts = p.sample_t;
      const auto& gs = p.sample_g;
      auto it = std::upper_bound(ts.begin(), ts.end(), t);
      const std::size_t seg =
          it == ts.end() ? ts.size() - 1 : static_cast<std::size_t>(it - ts.begin()) - 1;
      const std::size_t rate_seg = std::min(seg, ts.size() - 2);
      const double r = tab_rate(rate_seg);
      const double dt = t - ts[seg];
      const double part = r > 0.0 ? gs[seg] * -std::expm1(-r * dt) / r : gs[seg] * dt;
      return tab_cum_[seg] + part;
    }
  }
  return 0.0;
}

std::optional<double> RelaxationKernel::closed_form_mass() const {
  const auto& p = params_;
  switch (family_) {
    case KernelFamily::PowerLaw: return p.a / (p.nu - 1.0);
    case KernelFamily::StretchedExp: {
      const double s = 1.0 / p.alpha;
      return p.a / (p.alpha * std::pow(p.b, s)) * boost::math::tgamma(s, p.b);
    }
    case KernelFamily::PureExp: return p.a / p.b;
    case KernelFamily::Tabulated: {
      const auto n = p.sample_g.size();
      return tab_cum_.back() + p.sample_g[n - 1] / tab_rate(n - 2);
    }
  }
  return std::nullopt;
}

std::vector<std::pair<std::string, double>> RelaxationKernel::named_params() const {
  const auto& p = params_;
  switch (family_) {
    case KernelFamily::PowerLaw: return {{"a", p.a}, {"nu", p.nu}};
    case KernelFamily::StretchedExp: return {{"a", p.a}, {"b", p.b}, {"alpha", p.alpha}};
    case KernelFamily::PureExp: return {{"a", p.a}, {"b", p.b}};
    case KernelFamily::Tabulated:
      return {{"samples", static_cast<double>(p.sample_t.size())}};
  }
  return {};
}

MassDeficit kernel_mass_numeric(const RelaxationKernel& kernel) {
  MassDeficit out;
  if (kernel.family() == KernelFamily::Tabulated) {
    out.mass = *kernel.closed_form_mass();
    out.l = 1.0 - out.mass;
    return out;
  }
  const double log_cut = kernel.log_value(0.0) + std::log(kTailCutRatio);
  double t_cut = 1.0;
  while (kernel.log_value(t_cut) >= log_cut) t_cut *= 2.0;

  auto g = [&kernel](double s) { return kernel.value(s); };
  double err = 0.0;
  double body = gk_integrate(g, 0.0, std::min(1.0, t_cut), &err);
  for (double lo = 1.0; lo < t_cut; lo *= 10.0) {
    body += gk_integrate(g, lo, std::min(lo * 10.0, t_cut), &err);
  }

  const auto& p = kernel.params();
  double tail = 0.0;
  switch (kernel.family()) {
    case KernelFamily::PowerLaw:
      tail = p.a * std::pow(1.0 + t_cut, 1.0 - p.nu) / (p.nu - 1.0);
      break;
    case KernelFamily::PureExp:
      tail = p.a * std::exp(-p.b * t_cut) / p.b;
      break;
    case KernelFamily::StretchedExp: {
      const double s = 1.0 / p.alpha;
      tail = p.a / (p.alpha * std::pow(p.b, s)) *
             boost::math::tgamma(s, p.b * std::pow(1.0 + t_cut, p.alpha));
      break;
    }
    case KernelFamily::Tabulated:
      break;
  }
  out.mass = body + tail;
  out.l = 1.0 - out.mass;
  out.error_estimate = err;
  return out;
}

MassDeficit kernel_mass_deficit(const RelaxationKernel& kernel) {
  MassDeficit out;
  if (auto closed = kernel.closed_form_mass(); closed && kernel.family() != KernelFamily::Tabulated) {
    out.mass = *closed;
    out.l = 1.0 - *closed;
    out.closed_form = true;
    out.error_estimate = std::abs(*closed) * std::numeric_limits<double>::epsilon() * 4.0;
  } else {
    out = kernel_mass_numeric(kernel);
  }
  if (!(out.l > 0.0)) {
    std::ostringstream os;
    os << "int_0^inf g = " << out.mass << " >= 1 (mass deficit l = " << out.l << ")";
    throw Error(ErrorKind::HypothesisG1, os.str());
  }
  return out;
}

// ---------------------------------------------------------------------------

KernelCertificate::KernelCertificate(double l, double p, XiForm form,
                                     std::function<double(double)> custom)
    : l_(l), p_(p), form_(form), custom_(std::move(custom)) {
  if (form_.kind == XiForm::Kind::Custom && !custom_) {
    throw Error(ErrorKind::InvalidParameter, "custom xi requires a callable");
  }
}

double KernelCertificate::xi(double t) const {
  switch (form_.kind) {
    case XiForm::Kind::Constant: return form_.coefficient;
    case XiForm::Kind::PowerDecay: return form_.coefficient * std::pow(1.0 + t, -form_.exponent);
    case XiForm::Kind::Custom: return custom_(t);
  }
  return 0.0;
}

double KernelCertificate::xi_power_integral(double q, double t) const {
  if (t <= 0.0) return 0.0;
  switch (form_.kind) {
    case XiForm::Kind::Constant: return std::pow(form_.coefficient, q) * t;
    case XiForm::Kind::PowerDecay: {
      const double cq = std::pow(form_.coefficient, q);
      const double e = 1.0 - form_.exponent * q;
      if (std::abs(e) < 1e-14) return cq * std::log1p(t);
      return cq * std::expm1(e * std::log1p(t)) / e;
    }
    case XiForm::Kind::Custom: {
      auto f = [&](double s) { return std::pow(custom_(s), q); };
      return gk_integrate(f, 0.0, t, nullptr);
    }
  }
  return 0.0;
}

std::string KernelCertificate::describe_xi() const {
  std::ostringstream os;
  os.precision(17);
  switch (form_.kind) {
    case XiForm::Kind::Constant: os << "constant(" << form_.coefficient << ")"; break;
    case XiForm::Kind::PowerDecay:
      os << form_.coefficient << "*(1+t)^-" << form_.exponent;
      break;
    case XiForm::Kind::Custom: os << "custom"; break;
  }
  return os.str();
}

std::vector<double> certification_grid() {
  constexpr std::size_t n = 10000;
  std::vector<double> grid(n);
  grid[0] = 0.0;
  const double lo = std::log10(1e-6), hi = std::log10(1e3);
  for (std::size_t i = 1; i < n; ++i) {
    grid[i] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i - 1) / static_cast<double>(n - 2));
  }
  return grid;
}

void validate_certificate(const RelaxationKernel& kernel, KernelCertificate& cert) {
  const double p = cert.p();
  if (!(p >= 1.0 && p < 1.5)) {
    throw Error(ErrorKind::HypothesisG2, "p must lie in [1, 3/2), got " + std::to_string(p));
  }
  const bool tabulated = kernel.family() == KernelFamily::Tabulated;
  const std::vector<double> grid = tabulated ? kernel.params().sample_t : certification_grid();
  const double g0 = kernel.value(0.0);
  const double tol = tabulated ? 1e-10 : 1e-12 * g0;
  // Underflowed values carry no information about the inequality.
  const double log_floor = std::log(std::numeric_limits<double>::min()) + 50.0;

  double worst = -std::numeric_limits<double>::infinity();
  double prev_g = std::numeric_limits<double>::infinity();
  double prev_xi = std::numeric_limits<double>::infinity();
  for (double t : grid) {
    const double lg = kernel.log_value(t);
    if (!std::isfinite(lg)) {
      throw Error(ErrorKind::HypothesisG1, "kernel not positive at t = " + std::to_string(t));
    }
    const double xi = cert.xi(t);
    if (!(xi >= 0.0) || xi > prev_xi * (1.0 + 1e-14)) {
      throw Error(ErrorKind::HypothesisG2, "xi must be nonnegative and nonincreasing (t = " +
                                               std::to_string(t) + ")");
    }
    prev_xi = xi;
    if (lg < log_floor) continue;
    const double g = kernel.value(t);
    if (g > prev_g * (1.0 + 1e-14)) {
      throw Error(ErrorKind::InvalidParameter, "kernel increases near t = " + std::to_string(t));
    }
    prev_g = g;
    const double slack = kernel.derivative(t) + xi * std::pow(g, p);
    worst = std::max(worst, slack);
    if (slack > tol) {
      std::ostringstream os;
      os << "g'(t) + xi(t) g(t)^p = " << slack << " > " << tol << " at t = " << t;
      throw Error(ErrorKind::HypothesisG2, os.str());
    }
  }
  cert.max_slack_ = worst;
  cert.samples_ = grid.size();
}

KernelCertificate make_certificate(const RelaxationKernel& kernel, double p, XiForm form,
                                   std::function<double(double)> custom) {
  const MassDeficit mass = kernel_mass_deficit(kernel);
  KernelCertificate cert(mass.l, p, form, std::move(custom));
  validate_certificate(kernel, cert);
  return cert;
}

KernelCertificate certify_g2(const RelaxationKernel& kernel, std::optional<double> trial_p) {
  const MassDeficit mass = kernel_mass_deficit(kernel);
  const auto& prm = kernel.params();
  double p = 1.0;
  XiForm form;

  switch (kernel.family()) {
    case KernelFamily::PowerLaw: {
      const double canonical = (prm.nu + 1.0) / prm.nu;
      if (trial_p) {
        p = *trial_p;
        if (p > canonical) {
          throw Error(ErrorKind::HypothesisG2,
                      "power-law kernel admits p <= (nu+1)/nu only");
        }
      } else {
        p = canonical < 1.5 ? canonical : 1.0;
      }
      if (p == canonical) {
        form = {XiForm::Kind::Constant, prm.nu * std::pow(prm.a, -1.0 / prm.nu), 0.0};
      } else {
        // xi(t) = nu a^{1-p} (1+t)^{nu p - nu - 1}
        form = {XiForm::Kind::PowerDecay, prm.nu * std::pow(prm.a, 1.0 - p),
                prm.nu + 1.0 - prm.nu * p};
      }
      break;
    }
    case KernelFamily::StretchedExp:
      if (trial_p && *trial_p != 1.0) {
        throw Error(ErrorKind::HypothesisG2, "stretched-exponential kernels are certified with p = 1");
      }
      p = 1.0;
      if (prm.alpha <= 1.0) {
        form = {XiForm::Kind::PowerDecay, prm.b * prm.alpha, 1.0 - prm.alpha};
      } else {
        form = {XiForm::Kind::Constant, prm.b * prm.alpha, 0.0};
      }
      break;
    case KernelFamily::PureExp:
      if (trial_p && *trial_p != 1.0) {
        throw Error(ErrorKind::HypothesisG2, "exponential kernels are certified with p = 1");
      }
      p = 1.0;
      form = {XiForm::Kind::Constant, prm.b, 0.0};
      break;
    case KernelFamily::Tabulated: {
      p = trial_p.value_or(1.0);
      double xi = std::numeric_limits<double>::infinity();
      const auto& ts = prm.sample_t;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const double g = prm.sample_g[i];
        xi = std::min(xi, -kernel.derivative(ts[i]) / std::pow(g, p));
      }
      if (!(xi > 0.0)) {
        throw Error(ErrorKind::HypothesisG2, "no positive constant xi satisfies g' <= -xi g^p");
      }
      form = {XiForm::Kind::Constant, xi, 0.0};
      break;
    }
  }
  if (!(p >= 1.0 && p < 1.5)) {
    throw Error(ErrorKind::HypothesisG2, "no admissible (xi, p) with p < 3/2");
  }
  KernelCertificate cert(mass.l, p, form);
  validate_certificate(kernel, cert);
  return cert;
}

}  // namespace memheat
