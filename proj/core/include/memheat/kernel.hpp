#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace memheat {

enum class KernelFamily { PowerLaw, StretchedExp, PureExp, Tabulated };

std::string to_string(KernelFamily family);

/// Parameter bag accepted by make_kernel. Only the fields relevant to the
/// chosen family are read:
///   PowerLaw      g(t) = a (1+t)^-nu
///   StretchedExp  g(t) = a exp(-b (1+t)^alpha)
///   PureExp       g(t) = a exp(-b t)
///   Tabulated     log-linear interpolation of (sample_t, sample_g)
struct KernelParams {
  double a = 0.0;
  double b = 0.0;
  double alpha = 0.0;
  double nu = 0.0;
  std::vector<double> sample_t;
  std::vector<double> sample_g;
};

/// Positive, nonincreasing relaxation kernel with closed-form value,
/// derivative and running integral. Immutable once built.
class RelaxationKernel {
 public:
  KernelFamily family() const noexcept { return family_; }
  const KernelParams& params() const noexcept { return params_; }

  double value(double t) const;
  double derivative(double t) const;
  /// {g(t), g'(t)} sharing the expensive power/exponential.
  std::pair<double, double> value_and_derivative(double t) const;
  /// log g(t); finite even where value() underflows.
  double log_value(double t) const;
  /// G(t) = int_0^t g(s) ds.
  double integral(double t) const;
  /// int_0^inf g when the family has a closed form.
  std::optional<double> closed_form_mass() const;

  /// Named parameters for reporting, in a stable order.
  std::vector<std::pair<std::string, double>> named_params() const;

 private:
  friend RelaxationKernel make_kernel(KernelFamily, const KernelParams&);
  RelaxationKernel() = default;

  double tab_rate(std::size_t segment) const;

  KernelFamily family_ = KernelFamily::PureExp;
  KernelParams params_;
  // Tabulated support: nodal derivatives and cumulative integrals.
  std::vector<double> tab_dg_;
  std::vector<double> tab_cum_;
};

/// Throws InvalidParameter for nonpositive parameters or malformed samples and
/// DivergentMass for PowerLaw with nu <= 1.
RelaxationKernel make_kernel(KernelFamily family, const KernelParams& params);

struct MassDeficit {
  double l = 0.0;         ///< 1 - int_0^inf g
  double mass = 0.0;      ///< int_0^inf g
  double error_estimate = 0.0;
  bool closed_form = false;
};

/// Numerical int_0^inf g: adaptive Gauss-Kronrod on [0, T_cut] where
/// g(T_cut) < 1e-14 g(0), plus an analytic tail per family.
MassDeficit kernel_mass_numeric(const RelaxationKernel& kernel);

/// Mass deficit l. Closed form when available, quadrature otherwise.
/// Throws HypothesisG1 when int g >= 1.
MassDeficit kernel_mass_deficit(const RelaxationKernel& kernel);

/// Shape of xi in the (G2) inequality g' <= -xi g^p.
struct XiForm {
  enum class Kind {
    Constant,     ///< xi(t) = coefficient
    PowerDecay,   ///< xi(t) = coefficient * (1+t)^-exponent, exponent >= 0
    Custom,       ///< user supplied callable
  };
  Kind kind = Kind::Constant;
  double coefficient = 0.0;
  double exponent = 0.0;
};

class KernelCertificate {
 public:
  KernelCertificate(double l, double p, XiForm form,
                    std::function<double(double)> custom = {});

  double l() const noexcept { return l_; }
  double p() const noexcept { return p_; }
  const XiForm& xi_form() const noexcept { return form_; }
  bool has_closed_form_xi() const noexcept { return form_.kind != XiForm::Kind::Custom; }

  double xi(double t) const;
  /// int_0^t xi(s)^q ds, closed form unless xi is custom.
  double xi_power_integral(double q, double t) const;

  /// Largest observed g' + xi g^p on the validation grid (should be <= 0).
  double max_slack() const noexcept { return max_slack_; }
  std::size_t samples_checked() const noexcept { return samples_; }

  std::string describe_xi() const;

 private:
  friend void validate_certificate(const RelaxationKernel&, KernelCertificate&);

  double l_;
  double p_;
  XiForm form_;
  std::function<double(double)> custom_;
  double max_slack_ = 0.0;
  std::size_t samples_ = 0;
};

/// Canonical (xi, p) for the kernel's family:
///   PowerLaw(a, nu), nu > 2:  p = (nu+1)/nu, xi = nu a^{-1/nu}
///   PowerLaw(a, nu), nu <= 2: p = 1, xi(t) = nu/(1+t)
///   StretchedExp(a, b, alpha): p = 1, xi(t) = b alpha (1+t)^{alpha-1};
///                              constant b alpha when alpha > 1
///   PureExp(a, b):             p = 1, xi = b
///   Tabulated:                 largest constant xi for trial_p (default 1)
/// A trial p for PowerLaw selects xi(t) = nu a^{1-p} (1+t)^{nu p - nu - 1}.
/// The result is re-validated pointwise. Throws HypothesisG1/HypothesisG2.
KernelCertificate certify_g2(const RelaxationKernel& kernel,
                             std::optional<double> trial_p = std::nullopt);

/// Pointwise (G2) check on the validation grid: 10^4 log-spaced points in
/// [0, 1e3] (slack 1e-12 g(0)), or the sample nodes for tabulated kernels
/// (slack 1e-10 absolute). Also checks g > 0, g and xi nonincreasing, xi >= 0.
/// Updates the certificate's slack record; throws HypothesisG2 on failure.
void validate_certificate(const RelaxationKernel& kernel, KernelCertificate& certificate);

/// User-chosen (xi, p) pair, validated the same way as certify_g2's output.
KernelCertificate make_certificate(const RelaxationKernel& kernel, double p, XiForm form,
                                   std::function<double(double)> custom = {});

/// The 10^4-point log-spaced grid on [0, 1e3] used by validation.
std::vector<double> certification_grid();

}  // namespace memheat
