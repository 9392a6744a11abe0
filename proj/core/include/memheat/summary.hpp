#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace memheat {

/// Machine-readable outcome of one run:
/// {preset, kernel:{family,params,l,p}, energy:{E0,E_final},
///  envelope:{kind,lambda0,lambda1,margin}, fit:{model,params,window,residual},
///  checks:{monotone,dissipation_ratio,k0,integrable,energy_integral_tail}}
/// Absent optional values are written as null.
struct Summary {
  using Params = std::vector<std::pair<std::string, double>>;

  std::string preset;
  struct {
    std::string family;
    Params params;
    double l = 1.0;
    std::optional<double> p;
  } kernel;
  struct {
    double E0 = 0.0;
    double E_final = 0.0;
  } energy;
  struct {
    std::string kind;
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double margin = 0.0;
  } envelope;
  struct {
    std::string model;
    Params params;
    double window_start = 0.0;
    double window_end = 0.0;
    double residual = 0.0;
  } fit;
  struct {
    bool monotone = true;
    std::optional<double> dissipation_ratio;
    std::optional<double> k0;
    std::optional<bool> integrable;
    double energy_integral_tail = 0.0;
  } checks;
};

std::string to_json(const Summary& summary);

/// Schema check of a summary document; returns the list of violations
/// (empty when valid).
std::vector<std::string> validate_summary(const std::string& json_text);

}  // namespace memheat
