// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include "memheat/analysis.hpp"
#include "memheat/error.hpp"
#include "memheat/experiment.hpp"
#include "memheat/kernel.hpp"
#include "memheat/memory.hpp"
#include "memheat/presets.hpp"
#include "memheat/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

using namespace memheat;

namespace {

constexpr double kPi = std::numbers::pi;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunResult run_config(const RunConfig& c, bool compressed_allowed = true) {
  PreparedRun p = prepare(c);
  if (!compressed_allowed) p.options.compressed.reset();
  return run(p.u0, p.solver, p.kernel, p.a, p.options);
}

void guarded(int id, const char* name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  // Shared example31 run at the preset horizon T = 200.
  const RunConfig e31 = preset_config("example31");
  const RunResult r31 = run_config(e31);
  const KernelCertificate cert31 = *prepare(e31).certificate;

  guarded(1, "kernel certification", [] {
    const auto t0 = std::chrono::steady_clock::now();
    KernelParams p;
    p.a = 1.0;
    p.nu = 3.0;
    const auto g = make_kernel(KernelFamily::PowerLaw, p);
    const MassDeficit md = kernel_mass_deficit(g);
    const KernelCertificate c = certify_g2(g);
    const double secs = seconds_since(t0);
    // independent pointwise slack on the validation grid
    double slack = -1e300, xi_dev = 0.0;
    const auto grid = certification_grid();
    for (double t : grid) {
      slack = std::max(slack, g.derivative(t) + 3.0 * std::pow(g.value(t), 4.0 / 3.0));
      xi_dev = std::max(xi_dev, std::abs(c.xi(t) - 3.0));
    }
    const bool ok = std::abs(md.l - 0.5) <= 1e-6 && c.p() == 4.0 / 3.0 && xi_dev == 0.0 &&
                    slack <= 1e-12 && c.max_slack() <= 1e-12 && grid.size() == 10000 && secs < 1.0;
    report(1, "kernel certification", ok,
           fmt("l=%.9f p=%.17g xi=%s slack=%.2e samples=%zu time=%.3fs", md.l, c.p(),
               c.describe_xi().c_str(), std::max(slack, c.max_slack()), grid.size(), secs));
  });

  guarded(2, "heat-check oracle", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig hc = preset_config("heat-check");
    RunConfig half = hc;
    half.solver.dt *= 0.5;
    const double exact = kPi * kPi / 4.0 * std::exp(-2.0 * kPi * kPi * 0.1);
    const double e1 = std::abs(run_config(hc).trace.E.back() - exact) / exact;
    const double e2 = std::abs(run_config(half).trace.E.back() - exact) / exact;
    const double secs = seconds_since(t0);
    const double ratio = e1 / e2;
    report(2, "heat-check oracle", e1 <= 0.02 && ratio >= 1.7 && ratio <= 2.3 && secs < 10.0,
           fmt("rel_err=%.3e ratio(dt/2)=%.3f time=%.2fs", e1, ratio, secs));
  });

  guarded(3, "energy monotonicity", [&] {
    double worst = 0.0;
    int runs = 0, bad = 0;
    auto check = [&](const EnergyTrace& tr) {
      double w = 0.0;
      if (!energy_monotone(tr, 1e-10, &w)) ++bad;
      worst = std::max(worst, w);
      ++runs;
    };
    check(r31.trace);
    check(run_config(preset_config("example32")).trace);
    check(run_config(preset_config("heat-check")).trace);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) check(run_config(randomized_config(seed)).trace);
    report(3, "energy monotonicity", bad == 0,
           fmt("runs=%d violations=%d max_increase/E0=%.2e", runs, bad, worst));
  });

  guarded(4, "dissipation identity", [] {
    RunConfig c = preset_config("example31");
    c.mesh.cells = 128;
    c.solver.dt = 1e-2;
    c.solver.t_final = 50.0;
    c.solver.time_mesh = "uniform";
    double secs[2];
    EnergyTrace tr[2];
    for (int l = 0; l < 2; ++l) {
      const auto t0 = std::chrono::steady_clock::now();
      tr[l] = run_config(refined(c, l), false).trace;
      secs[l] = seconds_since(t0);
    }
    const double ratio = refinement_ratio(tr[0], tr[1]);
    report(4, "dissipation identity", ratio >= 1.8 && secs[0] < 120.0 && secs[1] < 120.0,
           fmt("residual ratio=%.3f (coarse %.3e) time=%.1fs/%.1fs", ratio,
               dissipation_residual(tr[0]).max_abs, secs[0], secs[1]));
  });

  guarded(5, "power-law decay bound", [&] {
    const auto& tr = r31.trace;
    const Window tail = default_tail(tr);
    const DecayEnvelope env = envelope(&cert31, tr, tail);
    const FitResult fit = fit_decay(tr, FitModel::PowerLaw, tail);
    double tail_max = 0.0, head_max = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const double s = tr.E[k] * std::pow(1.0 + tr.t[k], 3.0);
      double& slot = tr.t[k] >= tail.start ? tail_max : head_max;
      slot = std::max(slot, s);
    }
    const bool bounded = std::isfinite(tail_max) && tail_max <= head_max;
    const bool ok = bounded && fit.exponent <= -3.0 * 0.85 && env.margin >= 0.0 &&
                    env.kind == EnvelopeKind::OptimalPolynomial;
    report(5, "power-law decay bound", ok,
           fmt("sup_tail E(1+t)^3=%.4f (sup_head %.4f) exponent=%.4f lambda0=%.4f margin=%.4f",
               tail_max, head_max, fit.exponent, env.lambda0, env.margin));
  });

  guarded(6, "stretched decay bound", [] {
    const RunConfig c = preset_config("example32");
    const RunResult r = run_config(c);
    const KernelCertificate cert = *prepare(c).certificate;
    const Window tail = default_tail(r.trace);
    const FitResult fit = fit_decay(r.trace, FitModel::StretchedExponential, tail, 0.5);
    const DecayEnvelope env = envelope(&cert, r.trace, tail);
    // independent bound check with the fitted constants
    double worst = -1e300;
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
      const double t = r.trace.t[k];
      if (t < tail.start) continue;
      const double bound = env.lambda0 * std::exp(-std::abs(env.lambda1) * (std::sqrt(1.0 + t) - 1.0));
      worst = std::max(worst, r.trace.E[k] / bound);
    }
    const double slope = -fit.rate;
    const bool ok = slope < 0.0 && fit.residual <= 0.1 && env.margin >= 0.0 && worst <= 1.0 &&
                    env.kind == EnvelopeKind::Exponential && std::abs(env.lambda1 - fit.rate) < 1e-9;
    report(6, "stretched decay bound", ok,
           fmt("slope=%.4f residual=%.2e lambda0=%.4f lambda1=%.4f margin=%.4f", slope, fit.residual,
               env.lambda0, env.lambda1, env.margin));
  });

  guarded(7, "k0 stability", [&] {
    RunConfig c50 = preset_config("example31");
    c50.solver.t_final = 50.0;
    RunConfig c100 = c50;
    c100.solver.t_final = 100.0;
    const K0Result a = k0_ratio(run_config(c50).trace, cert31);
    const K0Result b = k0_ratio(run_config(c100).trace, cert31);
    const double growth = b.k0 / a.k0 - 1.0;
    report(7, "k0 stability", std::isfinite(a.k0) && a.k0 > 0.0 && growth < 0.05,
           fmt("k0(50)=%.6f k0(100)=%.6f growth=%.2e%% excluded=%zu/%zu", a.k0, b.k0, 100.0 * growth,
               b.excluded, b.excluded + b.used));
  });

  guarded(8, "Jensen property", [] {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int failed = 0;
    double worst = -1e300;
    for (int i = 0; i < 1000; ++i) {
      const int n = 2 + static_cast<int>(u(rng) * 200);
      std::vector<double> f(n), h(n);
      for (int j = 0; j < n; ++j) {
        f[j] = std::exp(8.0 * (u(rng) - 0.5));
        h[j] = u(rng);
      }
      const double p = 1.0 + 2.0 * u(rng) + 1e-12;
      const auto [lhs, rhs] = jensen_sides(f, h, p);
      worst = std::max(worst, lhs - rhs);
      if (!jensen_check(f, h, p)) ++failed;
    }
    double eq = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double c = std::exp(4.0 * (u(rng) - 0.5));
      std::vector<double> f(50, c), h(50);
      for (double& v : h) v = u(rng) + 1e-3;
      const auto [lhs, rhs] = jensen_sides(f, h, 1.0 + 2.0 * u(rng) + 1e-12);
      eq = std::max(eq, std::abs(lhs - rhs));
    }
    report(8, "Jensen property", failed == 0 && eq <= 1e-12,
           fmt("random failures=%d/1000 max(lhs-rhs)=%.2e constant-f gap=%.2e", failed, worst, eq));
  });

  guarded(9, "energy integral tail", [&] {
    const double i100 = energy_integral_to(r31.trace, 100.0);
    const double i200 = energy_integral_to(r31.trace, 200.0);
    const double inc = (i200 - i100) / i100;
    report(9, "energy integral tail", inc < 0.01,
           fmt("I(100)=%.8f I(200)=%.8f increment=%.2e", i100, i200, inc));
  });

  guarded(10, "integrability classifier", [&] {
    KernelParams p;
    p.a = 1.0;
    p.nu = 3.0;
    const auto g = make_kernel(KernelFamily::PowerLaw, p);
    const auto finite = check_integrability(make_certificate(g, 4.0 / 3.0, XiForm{XiForm::Kind::Constant, 3.0, 0.0}));
    const auto infinite =
        check_integrability(make_certificate(g, 1.25, XiForm{XiForm::Kind::PowerDecay, 1.0, 1.0}));
    // sweep of closed-form xi = c (1+t)^-beta, each certified against a power
    // law whose derivative dominates it, compared with the tail-exponent rule
    int cases = 0, disagree = 0;
    for (double nu : {2.5, 3.0, 4.0, 6.0, 10.0}) {
      KernelParams q;
      q.a = 0.5 * (nu - 1.0);
      q.nu = nu;
      const auto k = make_kernel(KernelFamily::PowerLaw, q);
      for (double pp : {1.02, 1.05, 1.1, 1.2, 1.3, (nu + 1.0) / nu}) {
        if (pp >= 1.5 || pp > (nu + 1.0) / nu) continue;
        const KernelCertificate c = certify_g2(k, pp);
        const auto r = check_integrability(c);
        const double beta = c.xi_form().kind == XiForm::Kind::Constant ? 0.0 : c.xi_form().exponent;
        const double qq = 2.0 * pp - 1.0;
        const bool rule = c.xi_form().coefficient > 0.0 && beta * qq < 1.0 &&
                          (1.0 - beta * qq) / (2.0 * pp - 2.0) > 1.0;
        ++cases;
        if (r.finite != rule || !r.numeric_agrees) ++disagree;
      }
    }
    const bool ok = finite.finite && !infinite.finite && finite.numeric_agrees && infinite.numeric_agrees &&
                    disagree == 0;
    report(10, "integrability classifier", ok,
           fmt("(3,4/3)=%s (1/(1+t),1.25)=%s tail exps %.3f/%.3f sweep %d/%d agree",
               finite.finite ? "finite" : "infinite", infinite.finite ? "finite" : "infinite",
               finite.tail_exponent, infinite.tail_exponent, cases - disagree, cases));
  });

  guarded(11, "compressed fast path", [&] {
    const PreparedRun p = prepare(e31);
    auto t0 = std::chrono::steady_clock::now();
    const RunResult direct = run(p.u0, p.solver, p.kernel, p.a, RunOptions{});
    const double t_direct = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    RunOptions fast;
    fast.compressed = compress_kernel(*p.kernel, p.solver.t_final, 12, 1e-5, 2.0);
    const RunResult comp = run(p.u0, p.solver, p.kernel, p.a, fast);
    const double t_comp = seconds_since(t0);
    double worst = 0.0;
    const bool same_stamps = direct.trace.t == comp.trace.t;
    for (std::size_t k = 0; same_stamps && k < direct.trace.size(); ++k) {
      if (direct.trace.E[k] > 0.0) {
        worst = std::max(worst, std::abs(comp.trace.E[k] - direct.trace.E[k]) / direct.trace.E[k]);
      }
    }
    const std::size_t steps = direct.trace.size() - 1;
    const double speedup = t_direct / t_comp;
    const bool ok = same_stamps && worst <= 1e-5 && speedup >= 5.0 && steps >= 4000 &&
                    p.solver.time_mesh.kind == TimeMesh::Kind::Geometric;
    report(11, "compressed fast path", ok,
           fmt("steps=%zu max_rel_dE=%.2e direct=%.3fs compressed=%.3fs speedup=%.1fx", steps, worst,
               t_direct, t_comp, speedup));
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
