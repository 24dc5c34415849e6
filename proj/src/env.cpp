#include "cfrl/env.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "cfrl/errors.hpp"

namespace cfrl {

CfState env_reset(const CfEvent& event) {
    if (event.size() == 0) {
        throw DataError("env_reset: event has no samples");
    }
    CfState s;
    s.follower_speed = event.follower[0].speed;
    s.relative_speed = event.leader[0].speed - event.follower[0].speed;
    s.gap = event.gap(0);
    s.prev_acceleration = event.follower[0].acceleration;
    s.step_index = 0;
    return s;
}

StepOutcome env_step(const CfState& state, double action_acceleration,
                     const CfEvent& event, const EnvConfig& config) {
    const int next = state.step_index + 1;
    if (next >= static_cast<int>(event.size()) || !(state.gap > 0.0)) {
        throw std::logic_error("env_step called on a terminal state");
    }

    const double dt = config.dt;
    const double v_next =
        std::max(0.0, state.follower_speed + action_acceleration * dt);
    const double leader_v_next = event.leader[static_cast<std::size_t>(next)].speed;
    const double dv_next = leader_v_next - v_next;
    const double gap_next =
        state.gap + 0.5 * (state.relative_speed + dv_next) * dt;
    const double jerk = (action_acceleration - state.prev_acceleration) / dt;

    StepOutcome out;
    out.next_state = CfState{v_next, dv_next, gap_next, action_acceleration, next};
    out.jerk = jerk;
    if (gap_next <= 0.0) {
        out.reward = collision_reward(jerk, config.reward);
        out.terminal = true;
        out.reason = TerminalReason::collision;
    } else {
        out.reward = step_reward(gap_next, v_next, leader_v_next, jerk, config.reward);
        out.terminal = next == static_cast<int>(event.size()) - 1;
        out.reason = out.terminal ? TerminalReason::event_end : TerminalReason::none;
    }
    return out;
}

std::vector<RolloutStep> run_event(const Policy& policy, const CfEvent& event,
                                   const EnvConfig& config) {
    std::vector<RolloutStep> log;
    if (event.size() < 2) return log;
    log.reserve(event.size() - 1);

    CfState state = env_reset(event);
    while (true) {
        const double action = policy(event, state);
        const StepOutcome out = env_step(state, action, event, config);
        const auto idx = static_cast<std::size_t>(out.next_state.step_index);
        RolloutStep rec;
        rec.step = out.next_state.step_index;
        rec.time = event.leader[idx].time;
        rec.leader_speed = event.leader[idx].speed;
        rec.follower_speed = out.next_state.follower_speed;
        rec.gap = out.next_state.gap;
        rec.action = action;
        rec.jerk = out.jerk;
        rec.reward = out.reward;
        log.push_back(rec);
        if (out.terminal) break;
        state = out.next_state;
    }
    return log;
}

double replay_policy(const CfEvent& event, const CfState& state) {
    return event.follower[static_cast<std::size_t>(state.step_index)].acceleration;
}

void write_rollout_log(const std::filesystem::path& path,
                       const std::vector<RolloutStep>& log) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (f == nullptr) {
        throw DataError("cannot open rollout log for writing: " + path.string());
    }
    std::fprintf(f, "step time leader_speed follower_speed gap action jerk "
                    "f_ttc f_headway f_jerk reward\n");
    for (const auto& r : log) {
        std::fprintf(f, "%d %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                     r.step, r.time, r.leader_speed, r.follower_speed, r.gap, r.action,
                     r.jerk, r.reward.ttc, r.reward.headway, r.reward.jerk,
                     r.reward.total);
    }
    std::fclose(f);
}

}  // namespace cfrl
