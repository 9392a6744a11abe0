#pragma once

#include "memheat/trace.hpp"

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace memheat {

/// Header `t,E,g_circ_grad,grad_sq,dissipation,envelope`, then one row per
/// stamp in shortest round-trip decimal form. Without an envelope column the
/// field reads `nan`.
void write_csv(std::ostream& os, const EnergyTrace& trace, std::span<const double> envelope = {});

/// Throws Io when the path cannot be written.
void emit_csv(const EnergyTrace& trace, const std::string& path,
              std::span<const double> envelope = {});

struct CsvTrace {
  std::vector<double> t, E, g_circ, grad_sq, dissipation, envelope;
};

/// Reads a file written by emit_csv. Throws Io or ConfigInvalid.
CsvTrace read_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace memheat
