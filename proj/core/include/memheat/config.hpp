#pragma once

#include "memheat/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace memheat {

/// Run configuration as read from an INI-style file:
///
///   preset = example31        ; optional, informational
///   seed = 7
///   [kernel]   family = none|power_law|stretched_exp|pure_exp, a, b, alpha, nu
///   [mesh]     dim, extent, cells
///   [field]    components, initial = sine|bump|random|random(<seed>)
///   [memory]   mode = direct|compressed, modes, tol, near_field
///   [solver]   m, dt, t_final, newton_tol, newton_max_iter, epsilon,
///              time_mesh = uniform|geometric(<ratio>)
///   [A]        mode = identity|constant|periodic, c0, entries (row-major)
///   [output]   dir, format = csv|json|both
///   [analysis] tail_start, refine_horizon
///
/// Unknown sections or keys, and kernel keys the chosen family does not use,
/// are rejected.
struct RunConfig {
  std::string preset;
  std::uint64_t seed = 0;

  struct Kernel {
    std::string family = "none";
    std::optional<double> a, b, alpha, nu;
    bool operator==(const Kernel&) const = default;
  } kernel;

  struct MeshSection {
    int dim = 1;
    double extent = 1.0;
    int cells = 64;
    bool operator==(const MeshSection&) const = default;
  } mesh;

  struct FieldSection {
    std::optional<int> components;  ///< defaults to mesh.dim
    std::string initial = "sine";
    bool operator==(const FieldSection&) const = default;
  } field;

  struct Memory {
    std::string mode = "direct";
    int modes = 12;
    double tol = 1e-5;
    double near_field = 2.0;
    bool operator==(const Memory&) const = default;
  } memory;

  struct Solver {
    double m = 2.0;
    double dt = 1e-2;
    double t_final = 1.0;
    double newton_tol = 1e-10;
    int newton_max_iter = 50;
    double epsilon = 1e-8;
    std::string time_mesh = "uniform";
    bool operator==(const Solver&) const = default;
  } solver;

  struct ASection {
    std::string mode = "identity";
    double c0 = 1.0;
    std::vector<double> entries;
    bool operator==(const ASection&) const = default;
  } A;

  struct Output {
    std::string dir = ".";
    std::string format = "both";
    bool operator==(const Output&) const = default;
  } output;

  struct Analysis {
    std::optional<double> tail_start;  ///< defaults to t_final / 2
    double refine_horizon = 5.0;
    bool operator==(const Analysis&) const = default;
  } analysis;

  int components() const { return field.components.value_or(mesh.dim); }
  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigInvalid on syntax errors, unknown keys or malformed values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

/// "uniform" or "geometric(<ratio>)". Throws ConfigInvalid.
TimeMesh parse_time_mesh(const std::string& text);
std::string to_string(const TimeMesh& mesh);

/// Structural checks that need no numerics (enumerations, ranges, kernel
/// keys per family, A entry count). Throws ConfigInvalid.
void validate_config(const RunConfig& config);

}  // namespace memheat
