#include "memheat/error.hpp"
#include "memheat/kernel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

using namespace memheat;

namespace {

// Composite Simpson on [0, T] with the substitution t = s/(1-s) mapped away:
// here a plain Simpson on a long interval plus a closed tail is enough.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

RelaxationKernel power_law(double a, double nu) {
  KernelParams p;
  p.a = a;
  p.nu = nu;
  return make_kernel(KernelFamily::PowerLaw, p);
}

RelaxationKernel stretched(double a, double b, double alpha) {
  KernelParams p;
  p.a = a;
  p.b = b;
  p.alpha = alpha;
  return make_kernel(KernelFamily::StretchedExp, p);
}

RelaxationKernel pure_exp(double a, double b) {
  KernelParams p;
  p.a = a;
  p.b = b;
  return make_kernel(KernelFamily::PureExp, p);
}

}  // namespace

TEST(Kernel, PowerLawValues) {
  const auto g = power_law(1.0, 3.0);
  EXPECT_DOUBLE_EQ(g.value(0.0), 1.0);
  EXPECT_DOUBLE_EQ(g.value(1.0), 0.125);
  EXPECT_DOUBLE_EQ(g.derivative(0.0), -3.0);
}

TEST(Kernel, StretchedValueAtZero) {
  const auto g = stretched(1.0, 1.0, 0.5);
  EXPECT_NEAR(g.value(0.0), std::exp(-1.0), 1e-15);
}

TEST(Kernel, PureExpValues) {
  const auto g = pure_exp(0.1, 2.0);
  EXPECT_NEAR(g.value(0.7), 0.1 * std::exp(-1.4), 1e-16);
  EXPECT_NEAR(g.derivative(0.0), -0.2, 1e-16);
}

TEST(Kernel, ValueAndDerivativeAgreeWithSeparateCalls) {
  for (const auto& g : {power_law(0.7, 2.5), stretched(0.3, 1.2, 0.6), pure_exp(0.4, 1.5)}) {
    for (double t : {0.0, 0.3, 5.0, 80.0}) {
      const auto [v, d] = g.value_and_derivative(t);
      EXPECT_NEAR(v, g.value(t), 1e-15 * g.value(0.0));
      EXPECT_NEAR(d, g.derivative(t), 1e-14 * std::abs(g.derivative(0.0)));
    }
  }
}

TEST(Kernel, DerivativeMatchesCentralDifference) {
  const auto g = stretched(0.3, 1.2, 0.6);
  for (double t : {0.1, 1.0, 10.0}) {
    const double h = 1e-5;
    EXPECT_NEAR(g.derivative(t), (g.value(t + h) - g.value(t - h)) / (2 * h), 1e-8);
  }
}

TEST(Kernel, RunningIntegralMatchesSimpson) {
  for (const auto& g : {power_law(0.7, 2.5), stretched(0.3, 1.2, 0.6), pure_exp(0.4, 1.5)}) {
    const double ref = simpson([&](double t) { return g.value(t); }, 0.0, 7.0, 20000);
    EXPECT_NEAR(g.integral(7.0), ref, 1e-10);
  }
}

TEST(Kernel, RejectsBadParameters) {
  EXPECT_THROW(power_law(-1.0, 3.0), Error);
  EXPECT_THROW(pure_exp(0.1, 0.0), Error);
  try {
    power_law(1.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DivergentMass);
  }
}

TEST(MassDeficit, PowerLawHalf) {
  const auto g = power_law(1.0, 3.0);
  const auto md = kernel_mass_deficit(g);
  EXPECT_NEAR(md.l, 0.5, 1e-12);
  // independent: Simpson on [0, 2000] plus the closed tail a (1+T)^{1-nu}/(nu-1)
  const double T = 2000.0;
  const double num = simpson([&](double t) { return g.value(t); }, 0.0, T, 400000) +
                     std::pow(1.0 + T, -2.0) / 2.0;
  EXPECT_NEAR(1.0 - num, 0.5, 1e-6);
  EXPECT_NEAR(kernel_mass_numeric(g).mass, 0.5, 1e-8);
}

TEST(MassDeficit, PowerLawViolatesG1) {
  try {
    kernel_mass_deficit(power_law(3.0, 2.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesisG1);
  }
}

TEST(MassDeficit, PureExp) {
  EXPECT_NEAR(kernel_mass_deficit(pure_exp(0.1, 2.0)).l, 0.95, 1e-14);
}

TEST(MassDeficit, StretchedNumericAgreesWithSimpson) {
  const auto g = stretched(0.5, 1.0, 0.5);
  // substitution s = sqrt(1+t): int = 2 a int_1^inf s e^{-s} ds = 4a/e
  const double exact = 4.0 * 0.5 / std::exp(1.0);
  EXPECT_NEAR(kernel_mass_numeric(g).mass, exact, 1e-9);
  const double simpson_mass = simpson([&](double t) { return g.value(t); }, 0.0, 3000.0, 600000);
  EXPECT_NEAR(simpson_mass, exact, 1e-8);
}

TEST(Certificate, PowerLawExponentAndRate) {
  const auto c = certify_g2(power_law(1.0, 3.0));
  EXPECT_EQ(c.p(), 4.0 / 3.0);
  EXPECT_EQ(c.xi_form().kind, XiForm::Kind::Constant);
  EXPECT_DOUBLE_EQ(c.xi(0.0), 3.0);
  EXPECT_DOUBLE_EQ(c.xi(100.0), 3.0);
  EXPECT_LE(c.max_slack(), 1e-12);
  EXPECT_EQ(c.samples_checked(), 10000u);
  EXPECT_NEAR(c.l(), 0.5, 1e-12);
}

TEST(Certificate, PowerLawInequalityHoldsPointwise) {
  const auto g = power_law(1.0, 3.0);
  const auto c = certify_g2(g);
  for (double t : certification_grid()) {
    EXPECT_LE(g.derivative(t) + c.xi(t) * std::pow(g.value(t), c.p()), 1e-12);
  }
}

TEST(Certificate, StretchedExampleKernel) {
  const auto c = certify_g2(stretched(std::exp(1.0) / 8.0, 1.0, 0.5));
  EXPECT_EQ(c.p(), 1.0);
  for (double t : {0.0, 3.0, 99.0}) EXPECT_NEAR(c.xi(t), 0.5 / std::sqrt(1.0 + t), 1e-15);
  // int_0^t xi = sqrt(1+t) - 1
  EXPECT_NEAR(c.xi_power_integral(1.0, 8.0), 2.0, 1e-12);
}

TEST(Certificate, PureExp) {
  const auto c = certify_g2(pure_exp(0.1, 2.0));
  EXPECT_EQ(c.p(), 1.0);
  EXPECT_DOUBLE_EQ(c.xi(5.0), 2.0);
}

TEST(Certificate, RejectsFalseRate) {
  try {
    make_certificate(pure_exp(0.1, 2.0), 1.0, XiForm{XiForm::Kind::Constant, 2.5, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesisG2);
  }
}

TEST(Certificate, XiPowerIntegralMatchesSimpson) {
  const auto c = certify_g2(stretched(0.3, 1.2, 0.6));
  for (double q : {1.0, 1.5}) {
    const double ref = simpson([&](double t) { return std::pow(c.xi(t), q); }, 0.0, 12.0, 20000);
    EXPECT_NEAR(c.xi_power_integral(q, 12.0), ref, 1e-10);
  }
}

TEST(Kernel, TabulatedInterpolatesLogLinearly) {
  KernelParams p;
  p.sample_t = {0.0, 1.0, 2.0, 4.0};
  p.sample_g = {0.4, 0.2, 0.1, 0.025};
  const auto g = make_kernel(KernelFamily::Tabulated, p);
  EXPECT_NEAR(g.value(0.5), 0.4 * std::pow(0.5, 0.5), 1e-15);
  EXPECT_NEAR(g.value(3.0), 0.1 * 0.5, 1e-15);
  const auto c = certify_g2(g);
  EXPECT_EQ(c.p(), 1.0);
  // largest constant rate: the smallest -g'/g over the sample nodes
  double rate = 1e300;
  for (double t : p.sample_t) rate = std::min(rate, -g.derivative(t) / g.value(t));
  EXPECT_NEAR(c.xi(0.0), rate, 1e-12);
}
