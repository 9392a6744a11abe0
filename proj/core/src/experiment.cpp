#include "memheat/experiment.hpp"

#include "memheat/error.hpp"
#include "memheat/io.hpp"
#include "memheat/parallel.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

namespace memheat {

namespace {

std::optional<RelaxationKernel> build_kernel(const RunConfig::Kernel& k) {
  KernelParams p;
  p.a = k.a.value_or(0.0);
  p.b = k.b.value_or(0.0);
  p.alpha = k.alpha.value_or(0.0);
  p.nu = k.nu.value_or(0.0);
  if (k.family == "none") return std::nullopt;
  if (k.family == "power_law") return make_kernel(KernelFamily::PowerLaw, p);
  if (k.family == "stretched_exp") return make_kernel(KernelFamily::StretchedExp, p);
  if (k.family == "pure_exp") return make_kernel(KernelFamily::PureExp, p);
  throw Error(ErrorKind::ConfigInvalid, "unknown kernel family '" + k.family + "'");
}

Eigen::MatrixXd entries_matrix(const RunConfig& c) {
  const int nc = c.components();
  if (c.A.entries.empty()) return Eigen::MatrixXd::Identity(nc, nc);
  Eigen::MatrixXd m(nc, nc);
  for (int i = 0; i < nc; ++i) {
    for (int j = 0; j < nc; ++j) m(i, j) = c.A.entries[static_cast<std::size_t>(i * nc + j)];
  }
  return m;
}

}  // namespace

MatrixA build_damping(const RunConfig& c) {
  const int nc = c.components();
  if (c.A.mode == "identity") return MatrixA::identity(nc, c.A.c0);
  if (c.A.mode == "constant") return MatrixA::constant(entries_matrix(c), c.A.c0);
  // periodic: A(t) = (1 + sin(t)/2) A_0
  const Eigen::MatrixXd base = entries_matrix(c);
  return MatrixA::time_varying(
      nc, [base](double t) -> Eigen::MatrixXd { return (1.0 + 0.5 * std::sin(t)) * base; }, c.A.c0);
}

PreparedRun prepare(const RunConfig& c) {
  validate_config(c);
  PreparedRun p{std::nullopt, std::nullopt, Mesh{}, Field{}, SolverConfig{},
                MatrixA::identity(1), RunOptions{}, {}};
  p.kernel = build_kernel(c.kernel);
  if (p.kernel) p.certificate = certify_g2(*p.kernel);
  p.mesh = build_mesh(c.mesh.dim, c.mesh.extent, c.mesh.cells);
  const std::string initial =
      c.field.initial == "random" ? "random(" + std::to_string(c.seed) + ")" : c.field.initial;
  p.u0 = make_initial_field(p.mesh, c.components(), parse_initial_condition(initial));

  p.solver.m = c.solver.m;
  p.solver.dt = c.solver.dt;
  p.solver.t_final = c.solver.t_final;
  p.solver.time_mesh = parse_time_mesh(c.solver.time_mesh);
  p.solver.newton_tol = c.solver.newton_tol;
  p.solver.newton_max_iter = c.solver.newton_max_iter;
  p.solver.epsilon = c.solver.epsilon;
  validate(p.solver, c.mesh.dim);

  p.a = build_damping(c);
  p.a.validate(make_time_stamps(p.solver));

  if (c.memory.mode == "compressed" && p.kernel) {
    const double t_end = c.solver.t_final;
    if (t_end > c.memory.near_field) {
      try {
        p.options.compressed =
            compress_kernel(*p.kernel, t_end, c.memory.modes, c.memory.tol, c.memory.near_field);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::CompressionFailed) throw;
        p.notes.push_back(std::string("direct history used: ") + e.what());
      }
    } else {
      p.notes.push_back("direct history used: horizon inside the near field");
    }
  }
  return p;
}

RunConfig refined(const RunConfig& c, int level) {
  RunConfig r = c;
  const double f = std::ldexp(1.0, level);
  r.solver.dt = c.solver.dt / f;
  r.mesh.cells = c.mesh.cells * static_cast<int>(f);
  const TimeMesh tm = parse_time_mesh(c.solver.time_mesh);
  if (tm.kind == TimeMesh::Kind::Geometric) {
    r.solver.time_mesh = to_string(TimeMesh{tm.kind, std::pow(tm.ratio, 1.0 / f)});
  }
  return r;
}

std::optional<std::function<double(double)>> heat_oracle(const RunConfig& c) {
  if (c.kernel.family != "none" || c.solver.m != 2.0 || c.A.mode != "identity" ||
      c.field.initial != "sine") {
    return std::nullopt;
  }
  const double l = c.mesh.extent;
  const double lambda = std::numbers::pi * std::numbers::pi * c.mesh.dim / (l * l);
  const double mass = std::pow(0.5 * l, c.mesh.dim) * c.components();
  return [lambda, mass](double t) { return 0.5 * lambda * mass * std::exp(-2.0 * lambda * t); };
}

namespace {

FitResult summary_fit(const RunConfig& c, const EnergyTrace& tr, const Window& w) {
  if (c.kernel.family == "power_law") return fit_decay(tr, FitModel::PowerLaw, w);
  const double nu = c.kernel.family == "stretched_exp" ? *c.kernel.alpha : 1.0;
  return fit_decay(tr, FitModel::StretchedExponential, w, nu);
}

std::optional<double> companion_ratio(const RunConfig& c) {
  RunConfig base = c;
  base.solver.t_final = std::min(c.solver.t_final, c.analysis.refine_horizon);
  base.memory.mode = "direct";
  if (!(base.solver.t_final > 0.0)) return std::nullopt;
  const RunConfig levels[] = {base, refined(base, 1)};
  EnergyTrace traces[2];
  parallel_for(2, [&](std::size_t i) {
    PreparedRun p = prepare(levels[i]);
    traces[i] = run(p.u0, p.solver, p.kernel, p.a, p.options).trace;
  });
  return refinement_ratio(traces[0], traces[1]);
}

}  // namespace

Outcome execute(const RunConfig& c, bool companion) {
  PreparedRun p = prepare(c);
  Outcome out;
  out.notes = p.notes;
  out.result = run(p.u0, p.solver, p.kernel, p.a, p.options);
  const EnergyTrace& tr = out.result.trace;
  const double t_end = tr.t.back();
  const Window tail{c.analysis.tail_start.value_or(0.5 * t_end), t_end};

  const KernelCertificate* cert = p.certificate ? &*p.certificate : nullptr;
  out.envelope = envelope(cert, tr, tail);
  out.envelope_column.resize(tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k) out.envelope_column[k] = out.envelope.value(tr.t[k]);

  Summary& s = out.summary;
  s.preset = c.preset;
  s.kernel.family = c.kernel.family;
  if (p.kernel) {
    s.kernel.params = p.kernel->named_params();
    s.kernel.l = cert->l();
    s.kernel.p = cert->p();
  }
  s.energy.E0 = tr.E.front();
  s.energy.E_final = tr.E.back();
  s.envelope.kind = to_string(out.envelope.kind);
  s.envelope.lambda0 = out.envelope.lambda0;
  s.envelope.lambda1 = out.envelope.lambda1;
  s.envelope.margin = out.envelope.margin;

  s.fit.window_start = tail.start;
  s.fit.window_end = tail.end;
  try {
    const FitResult fit = summary_fit(c, tr, tail);
    s.fit.model = to_string(fit.model);
    if (fit.model == FitModel::PowerLaw) {
      s.fit.params = {{"amplitude", fit.amplitude}, {"exponent", fit.exponent}};
    } else {
      s.fit.params = {{"amplitude", fit.amplitude}, {"rate", fit.rate}, {"nu", fit.nu}};
    }
    s.fit.residual = fit.residual;
  } catch (const Error& e) {
    s.fit.model = c.kernel.family == "power_law" ? "power_law" : "stretched_exp";
    s.fit.residual = std::nan("");
    out.notes.push_back(std::string("no decay fit: ") + e.what());
  }

  s.checks.monotone = energy_monotone(tr);
  if (cert) {
    try {
      s.checks.k0 = k0_ratio(tr, *cert).k0;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Indeterminate) throw;
    }
    if (cert->p() > 1.0) s.checks.integrable = check_integrability(*cert).finite;
  }
  s.checks.energy_integral_tail = energy_integral(tr).tail_increment;
  if (companion) {
    try {
      s.checks.dissipation_ratio = companion_ratio(c);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TooFewStamps) throw;
    }
  }
  return out;
}

std::vector<std::string> write_artifacts(const Outcome& o, const RunConfig& c) {
  std::error_code ec;
  std::filesystem::create_directories(c.output.dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create '" + c.output.dir + "': " + ec.message());
  std::vector<std::string> paths;
  const std::filesystem::path dir(c.output.dir);
  if (c.output.format != "json") {
    const std::string path = (dir / "trace.csv").string();
    emit_csv(o.result.trace, path, o.envelope_column);
    paths.push_back(path);
  }
  if (c.output.format != "csv") {
    const std::string path = (dir / "summary.json").string();
    write_text_file(path, to_json(o.summary));
    paths.push_back(path);
  }
  return paths;
}

ConvergenceReport convergence_study(const RunConfig& c, int levels) {
  if (levels < 2) throw Error(ErrorKind::InvalidParameter, "a convergence study needs >= 2 levels");
  ConvergenceReport rep;
  rep.levels.resize(static_cast<std::size_t>(levels));
  const auto oracle = heat_oracle(c);
  parallel_for(rep.levels.size(), [&](std::size_t l) {
    RunConfig cl = refined(c, static_cast<int>(l));
    PreparedRun p = prepare(cl);
    const RunResult r = run(p.u0, p.solver, p.kernel, p.a, p.options);
    ConvergenceLevel& lv = rep.levels[l];
    lv.dt = cl.solver.dt;
    lv.cells = cl.mesh.cells;
    // common window: from the first interior stamp of level 0
    lv.residual = dissipation_residual(r.trace, c.solver.dt).max_abs;
    lv.E_final = r.trace.E.back();
    if (oracle) {
      const double exact = (*oracle)(r.trace.t.back());
      lv.oracle_error = std::abs(lv.E_final - exact) / exact;
    }
  });
  for (std::size_t l = 1; l < rep.levels.size(); ++l) {
    const auto& a = rep.levels[l - 1];
    const auto& b = rep.levels[l];
    rep.residual_ratios.push_back(b.residual > 0.0 ? a.residual / b.residual : std::nan(""));
    if (a.oracle_error && b.oracle_error) rep.oracle_ratios.push_back(*a.oracle_error / *b.oracle_error);
  }
  return rep;
}

}  // namespace memheat
