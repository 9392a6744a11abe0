// memheat: command line front end for the memory-damped solver.

#include "memheat/analysis.hpp"
#include "memheat/config.hpp"
#include "memheat/error.hpp"
#include "memheat/experiment.hpp"
#include "memheat/io.hpp"
#include "memheat/kernel.hpp"
#include "memheat/presets.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace memheat;

void print_double(const char* key, double v) { std::cout << key << " = " << format_double(v) << '\n'; }

int report(const Outcome& o, const RunConfig& c, bool write) {
  for (const auto& n : o.notes) std::cerr << "note: " << n << '\n';
  if (write) {
    for (const auto& p : write_artifacts(o, c)) std::cout << "wrote " << p << '\n';
  }
  const auto& s = o.summary;
  print_double("E0", s.energy.E0);
  print_double("E_final", s.energy.E_final);
  std::cout << "envelope = " << s.envelope.kind << '\n';
  print_double("lambda0", s.envelope.lambda0);
  print_double("lambda1", s.envelope.lambda1);
  print_double("margin", s.envelope.margin);
  std::cout << "monotone = " << (s.checks.monotone ? "true" : "false") << '\n';
  if (s.checks.dissipation_ratio) print_double("dissipation_ratio", *s.checks.dissipation_ratio);
  if (!s.checks.monotone) {
    std::cerr << "energy increased along the trace\n";
    return exit_code(ErrorKind::TheoremCheck);
  }
  if (!(s.envelope.margin >= 0.0)) {
    std::cerr << "energy exceeds the fitted envelope on the tail window\n";
    return exit_code(ErrorKind::TheoremCheck);
  }
  return 0;
}

int cmd_simulate(const std::string& path, bool companion) {
  const RunConfig c = load_config(path);
  return report(execute(c, companion), c, true);
}

int cmd_preset(const std::string& name, const std::optional<std::string>& dir, bool companion) {
  RunConfig c = preset_config(name);
  if (dir) c.output.dir = *dir;
  return report(execute(c, companion), c, true);
}

int cmd_certify(const std::string& path) {
  const RunConfig c = load_config(path);
  const PreparedRun p = prepare(c);
  if (!p.kernel) {
    std::cout << "kernel = none (no memory term)\n";
    return 0;
  }
  const MassDeficit md = kernel_mass_deficit(*p.kernel);
  const KernelCertificate& cert = *p.certificate;
  std::cout << "family = " << c.kernel.family << '\n';
  print_double("mass", md.mass);
  print_double("l", cert.l());
  print_double("p", cert.p());
  std::cout << "xi = " << cert.describe_xi() << '\n';
  print_double("max_slack", cert.max_slack());
  std::cout << "samples = " << cert.samples_checked() << '\n';
  if (cert.p() > 1.0) {
    const IntegrabilityResult ir = check_integrability(cert);
    std::cout << "integrable = " << (ir.finite ? "true" : "false")
              << (ir.analytic ? " (tail rule)" : " (numeric)") << '\n';
  }
  return 0;
}

int cmd_fit(const std::string& path, const std::string& model, double nu,
            std::optional<double> tail_start) {
  const CsvTrace tr = read_csv(path);
  if (tr.t.size() < 2) throw Error(ErrorKind::TooFewStamps, "trace has fewer than 2 stamps");
  const double t_end = tr.t.back();
  const Window w{tail_start.value_or(0.5 * t_end), t_end};
  const FitModel m = model == "power_law" ? FitModel::PowerLaw : FitModel::StretchedExponential;
  const FitResult f = fit_decay(tr.t, tr.E, m, w, nu);
  std::cout << "model = " << to_string(f.model) << '\n';
  print_double("window_start", w.start);
  print_double("window_end", w.end);
  print_double("amplitude", f.amplitude);
  if (m == FitModel::PowerLaw) {
    print_double("exponent", f.exponent);
  } else {
    print_double("rate", f.rate);
    print_double("nu", f.nu);
  }
  print_double("residual", f.residual);
  std::cout << "points = " << f.points << '\n';
  return 0;
}

int cmd_converge(const std::string& path, int levels) {
  const RunConfig c = load_config(path);
  const ConvergenceReport r = convergence_study(c, levels);
  std::cout << "level,dt,cells,residual,E_final,oracle_error\n";
  for (std::size_t l = 0; l < r.levels.size(); ++l) {
    const auto& lv = r.levels[l];
    std::cout << l << ',' << format_double(lv.dt) << ',' << lv.cells << ','
              << format_double(lv.residual) << ',' << format_double(lv.E_final) << ','
              << (lv.oracle_error ? format_double(*lv.oracle_error) : "nan") << '\n';
  }
  for (std::size_t i = 0; i < r.residual_ratios.size(); ++i) {
    std::cout << "residual_ratio[" << i << "] = " << format_double(r.residual_ratios[i]) << '\n';
  }
  for (std::size_t i = 0; i < r.oracle_ratios.size(); ++i) {
    std::cout << "oracle_ratio[" << i << "] = " << format_double(r.oracle_ratios[i]) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"memheat: memory-damped nonlinear heat solver and decay checks"};
  app.require_subcommand(1);

  std::string config_path, trace_path, preset_name, model = "power_law";
  std::optional<std::string> out_dir;
  std::optional<double> tail_start;
  double nu = 1.0;
  int levels = 3;
  bool no_companion = false;
  std::uint64_t seed = 0;

  auto* sim = app.add_subcommand("simulate", "run a config file and write trace.csv / summary.json");
  sim->add_option("--config", config_path, "config file")->required();
  sim->add_flag("--no-companion", no_companion, "skip the refinement runs behind dissipation_ratio");

  auto* pre = app.add_subcommand("preset", "run a named preset");
  pre->add_option("name", preset_name, "example31 | example32 | heat-check")->required();
  pre->add_option("--out", out_dir, "output directory (default: the preset name)");
  pre->add_flag("--no-companion", no_companion, "skip the refinement runs behind dissipation_ratio");

  auto* cert = app.add_subcommand("certify-kernel", "print the kernel's mass deficit and (xi, p)");
  cert->add_option("--config", config_path, "config file")->required();

  auto* fit = app.add_subcommand("fit", "fit a decay model to a trace CSV");
  fit->add_option("--trace", trace_path, "trace CSV")->required();
  fit->add_option("--model", model, "power_law | stretched_exp")
      ->check(CLI::IsMember({"power_law", "stretched_exp"}));
  fit->add_option("--nu", nu, "stretch exponent for stretched_exp");
  fit->add_option("--tail-start", tail_start, "window start (default T/2)");

  auto* conv = app.add_subcommand("converge", "joint (dt, h) refinement study");
  conv->add_option("--config", config_path, "config file")->required();
  conv->add_option("--levels", levels, "number of refinement levels");

  auto* sample = app.add_subcommand("sample-config", "print a randomized config");
  sample->add_option("--seed", seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*sim) return cmd_simulate(config_path, !no_companion);
    if (*pre) return cmd_preset(preset_name, out_dir, !no_companion);
    if (*cert) return cmd_certify(config_path);
    if (*fit) return cmd_fit(trace_path, model, nu, tail_start);
    if (*conv) return cmd_converge(config_path, levels);
    if (*sample) {
      std::cout << serialize_config(randomized_config(seed));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
