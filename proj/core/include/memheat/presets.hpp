#pragma once

#include "memheat/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace memheat {

/// example31   power-law kernel a = 1, nu = 3 (int g = 1/2), m = 2, 1D, 64 cells,
///             sine data, geometric steps from 0.01 (ratio 1.00065) to T = 200
/// example32   stretched kernel a = e/8, b = 1, alpha = 1/2 (int g = 1/2), same grid
/// heat-check  no kernel, m = 2, 1D, 256 cells, dt = 1e-4 to T = 0.1
/// Throws ConfigInvalid for an unknown name.
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

/// Small randomized configuration drawn from a seeded mt19937_64: kernel
/// family and parameters (mass in [0.2, 0.7]), m in [2, 3], 1D or 2D, one or
/// two components, identity or constant SPD damping, sine/bump/random data,
/// uniform or geometric steps. Same seed, same config.
RunConfig randomized_config(std::uint64_t seed);

}  // namespace memheat
