#pragma once

#include "sthygarch/model.hpp"

#include <cstdint>
#include <vector>

namespace sthygarch {

struct SimConfig {
    ThetaFull theta;
    TransitionSpec spec;
    std::size_t n = 1000;
    std::size_t burn_in = 1000;
    std::uint64_t seed = 1;
    std::size_t k_max = kDefaultTruncation;
    // AsymmetricAverage: the squared-return percentile is recomputed from the
    // expanding sample every this many steps (no threshold before the first refresh).
    std::size_t threshold_refresh = 500;
};

struct SimulatedPath {
    std::vector<double> y;
    std::vector<double> h;
    std::vector<double> w;
};

// Starting conditions used during simulation: zero presample, components seeded at their intercepts.
FilterSetup simulation_setup(const SimConfig& config);

// Generates burn_in + n steps of y_t = sqrt(h_t) eps_t and keeps the last n.
SimulatedPath simulate_path(const SimConfig& config);
std::vector<double> simulate(const SimConfig& config);

} // namespace sthygarch
