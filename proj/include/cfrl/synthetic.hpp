#pragma once

#include <cstdint>
#include <vector>

#include "cfrl/events.hpp"

namespace cfrl {

// Deterministic synthetic car-following fleet: leaders alternate between
// piecewise-constant (hold/ramp) and sinusoidal speed profiles; followers
// start at the leader speed with an initial headway drawn from the fitted
// headway distribution and track a constant time headway with a damped
// linear controller integrated under the same kinematics as the simulator.
struct SyntheticConfig {
    int min_samples = 152;  // 15.2 s at 10 Hz
    int max_samples = 400;  // 40 s
    double min_speed = 8.0;
    double max_speed = 18.0;
    double headway_mu = 0.4226;
    double headway_sigma = 0.4365;
    double min_initial_headway = 0.7;
    double max_initial_headway = 2.5;
    double dt = kSampleInterval;
};

std::vector<CfEvent> make_synthetic_fleet(int count, std::uint64_t seed,
                                          const SyntheticConfig& config = {});

}  // namespace cfrl
