#pragma once

#include <functional>
#include <vector>

#include "cfrl/events.hpp"
#include "cfrl/reward.hpp"

namespace cfrl {

// Car-following state: everything the controller sees plus the jerk
// bookkeeping and the cursor into the event's leader profile.
struct CfState {
    double follower_speed = 0.0;
    double relative_speed = 0.0;  // leader minus follower
    double gap = 0.0;
    double prev_acceleration = 0.0;
    int step_index = 0;
};

enum class TerminalReason { none, event_end, collision };

struct StepOutcome {
    CfState next_state;
    RewardBreakdown reward;
    double jerk = 0.0;
    bool terminal = false;
    TerminalReason reason = TerminalReason::none;
};

struct EnvConfig {
    RewardSpec reward;
    double dt = kSampleInterval;
};

// State initialized from the event's first sample; deterministic and
// independent of any previous rollout.
CfState env_reset(const CfEvent& event);

// One kinematic point-mass update driven by the event's recorded leader
// profile: speed integrates the commanded acceleration (floored at zero),
// the gap integrates the relative speed trapezoidally, and the reward is
// evaluated on the post-update state. Terminal when the event's samples are
// exhausted or the gap closes. Throws std::logic_error when called past the
// end of the event.
StepOutcome env_step(const CfState& state, double action_acceleration,
                     const CfEvent& event, const EnvConfig& config = {});

// Per-step record of a rollout; leader columns are copied verbatim from the
// event.
struct RolloutStep {
    int step = 0;  // index of the post-update sample, starts at 1
    double time = 0.0;
    double leader_speed = 0.0;
    double follower_speed = 0.0;
    double gap = 0.0;
    double action = 0.0;
    double jerk = 0.0;
    RewardBreakdown reward;
};

using Policy = std::function<double(const CfEvent&, const CfState&)>;

// Replays the whole event under the policy, stopping at event end or
// collision.
std::vector<RolloutStep> run_event(const Policy& policy, const CfEvent& event,
                                   const EnvConfig& config = {});

// Convenience policy that replays the follower's recorded accelerations.
double replay_policy(const CfEvent& event, const CfState& state);

void write_rollout_log(const std::filesystem::path& path,
                       const std::vector<RolloutStep>& log);

}  // namespace cfrl
