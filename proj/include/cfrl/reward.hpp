#pragma once

#include <optional>

#include "cfrl/lognormal.hpp"

namespace cfrl {

struct RewardWeights {
    double ttc = 1.0;
    double headway = 1.0;
    double jerk = 1.0;
};

struct RewardSpec {
    RewardWeights weights;
    LognormalParams headway_fit;     // defaults to the empirical headway fit
    double ttc_safety_limit = 7.0;   // seconds; TTC above this carries no penalty
    double ttc_floor = 0.1;          // seconds; TTC is clamped here before the log
};

struct RewardBreakdown {
    double ttc = 0.0;      // <= 0
    double headway = 0.0;  // >= 0
    double jerk = 0.0;     // in [0, 1] for |jerk| <= 60
    double total = 0.0;    // w1*ttc + w2*headway - w3*jerk
};

// Time left before the follower reaches the leader's rear bumper; empty when
// the gap is constant or opening. Throws DataError when called with a
// non-positive gap (collision state).
std::optional<double> time_to_collision(double gap, double follower_speed,
                                        double leader_speed);

// log(TTC / limit) for TTC in [0, limit], clamped at floor_ttc below; zero
// when TTC is undefined or above the limit.
double ttc_feature(std::optional<double> ttc, double safety_limit = 7.0,
                   double floor_ttc = 0.1);

// Density of the fitted headway distribution; zero for non-positive headway.
double headway_feature(double headway, const LognormalParams& params);

// jerk^2 / 3600: unit value at the largest jerk the actuator can produce
// (full -3..3 m/s^2 swing over one 0.1 s step).
double jerk_feature(double jerk);

RewardBreakdown step_reward(double gap, double follower_speed, double leader_speed,
                            double jerk, const RewardSpec& spec);

// Reward charged on the step that closes the gap to zero or below: the
// floored TTC penalty with no headway credit.
RewardBreakdown collision_reward(double jerk, const RewardSpec& spec);

}  // namespace cfrl
