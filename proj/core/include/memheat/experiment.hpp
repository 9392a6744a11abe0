#pragma once

#include "memheat/analysis.hpp"
#include "memheat/config.hpp"
#include "memheat/kernel.hpp"
#include "memheat/solver.hpp"
#include "memheat/summary.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace memheat {

/// Everything a run needs, built and validated from a config: kernel with
/// its (G1)/(G2) certificate, mesh, initial field, schedule and damping.
struct PreparedRun {
  std::optional<RelaxationKernel> kernel;
  std::optional<KernelCertificate> certificate;
  Mesh mesh;
  Field u0;
  SolverConfig solver;
  MatrixA a;
  RunOptions options;
  std::vector<std::string> notes;  ///< e.g. a compression fallback
};

/// Throws ConfigInvalid, the hypothesis errors, or Coercivity.
PreparedRun prepare(const RunConfig& config);

MatrixA build_damping(const RunConfig& config);

/// Level l of a refinement ladder: dt / 2^l, cells * 2^l, geometric ratio
/// r^(1/2^l).
RunConfig refined(const RunConfig& config, int level);

struct Outcome {
  RunResult result;
  DecayEnvelope envelope;
  std::vector<double> envelope_column;
  Summary summary;
  std::vector<std::string> notes;
};

/// Runs the config and evaluates every check that feeds the summary. With
/// `companion` the dissipation ratio comes from two extra direct runs at
/// (dt, h) and (dt/2, h/2) over [0, min(T, analysis.refine_horizon)].
Outcome execute(const RunConfig& config, bool companion = true);

/// Writes trace.csv and/or summary.json into output.dir (created if needed).
/// Returns the paths written.
std::vector<std::string> write_artifacts(const Outcome& outcome, const RunConfig& config);

/// Closed-form energy when the config is a pure heat problem (no kernel,
/// m = 2, A = I, sine data), else empty.
std::optional<std::function<double(double)>> heat_oracle(const RunConfig& config);

struct ConvergenceLevel {
  double dt = 0.0;
  int cells = 0;
  double residual = 0.0;            ///< dissipation residual max_abs
  double E_final = 0.0;
  std::optional<double> oracle_error;  ///< |E - E_exact| / E_exact at T
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;
  std::vector<double> residual_ratios;  ///< level l-1 over level l
  std::vector<double> oracle_ratios;
};

/// Runs levels 0..levels-1 of refined(config, l) concurrently. Throws
/// InvalidParameter for levels < 2.
ConvergenceReport convergence_study(const RunConfig& config, int levels);

}  // namespace memheat
