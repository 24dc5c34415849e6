#include "cfrl/reward.hpp"

#include <algorithm>
#include <cmath>

#include "cfrl/errors.hpp"

namespace cfrl {

std::optional<double> time_to_collision(double gap, double follower_speed,
                                        double leader_speed) {
    if (!(gap > 0.0)) {
        throw DataError("time_to_collision: non-positive gap (collision state)");
    }
    const double closing = follower_speed - leader_speed;
    if (closing <= 0.0) {
        return std::nullopt;
    }
    return gap / closing;
}

double ttc_feature(std::optional<double> ttc, double safety_limit, double floor_ttc) {
    if (!ttc.has_value() || *ttc > safety_limit) {
        return 0.0;
    }
    return std::log(std::max(*ttc, floor_ttc) / safety_limit);
}

double headway_feature(double headway, const LognormalParams& params) {
    return lognormal_pdf(headway, params);
}

double jerk_feature(double jerk) { return jerk * jerk / 3600.0; }

RewardBreakdown step_reward(double gap, double follower_speed, double leader_speed,
                            double jerk, const RewardSpec& spec) {
    RewardBreakdown r;
    r.ttc = ttc_feature(time_to_collision(gap, follower_speed, leader_speed),
                        spec.ttc_safety_limit, spec.ttc_floor);
    r.headway = follower_speed > 0.0
                    ? headway_feature(gap / follower_speed, spec.headway_fit)
                    : 0.0;
    r.jerk = jerk_feature(jerk);
    r.total = spec.weights.ttc * r.ttc + spec.weights.headway * r.headway -
              spec.weights.jerk * r.jerk;
    return r;
}

RewardBreakdown collision_reward(double jerk, const RewardSpec& spec) {
    RewardBreakdown r;
    r.ttc = ttc_feature(0.0, spec.ttc_safety_limit, spec.ttc_floor);
    r.headway = 0.0;
    r.jerk = jerk_feature(jerk);
    r.total = spec.weights.ttc * r.ttc + spec.weights.headway * r.headway -
              spec.weights.jerk * r.jerk;
    return r;
}

}  // namespace cfrl
