#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cfrl/checkpoint.hpp"
#include "cfrl/env.hpp"
#include "cfrl/mlp.hpp"
#include "cfrl/rng.hpp"

namespace cfrl {

// Fixed scales that bring the three state components to comparable
// magnitudes before they reach the networks.
struct NormScales {
    double speed = 30.0;
    double relative_speed = 10.0;
    double gap = 100.0;
};

inline std::array<double, 3> normalize_state(const CfState& s, const NormScales& n) {
    return {s.follower_speed / n.speed, s.relative_speed / n.relative_speed,
            s.gap / n.gap};
}

struct Transition {
    std::array<double, 3> state;  // raw (speed, relative speed, gap)
    std::array<double, 3> state_norm;
    double action = 0.0;
    double reward = 0.0;
    std::array<double, 3> next_state;
    std::array<double, 3> next_state_norm;
    bool terminal = false;
};

// Bounded FIFO; eviction is strictly oldest-first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(const Transition& t);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }

    // i = 0 is the oldest stored transition
    const Transition& at(std::size_t i) const;

    // n uniform draws with replacement; requires size() >= n
    void sample(std::size_t n, Rng& rng, std::vector<Transition>& out) const;

private:
    std::vector<Transition> data_;
    std::size_t capacity_ = 0;
    std::size_t head_ = 0;  // next write position
    std::size_t size_ = 0;
};

// Discrete Ornstein-Uhlenbeck process with unit time step:
// x <- x + theta * (mu - x) + sigma * g.
struct OuNoise {
    double value = 0.0;
    double theta = 0.15;
    double sigma = 0.2;
    double mu = 0.0;

    double sample(Rng& rng) {
        value += theta * (mu - value) + sigma * rng.gaussian();
        return value;
    }
};

struct TrainConfig {
    int episodes = 60;
    int minibatch = 32;
    double gamma = 0.99;
    double tau = 0.001;
    double actor_lr = 0.001;
    double critic_lr = 0.001;
    std::size_t buffer_capacity = 7000;
    int hidden_dim = 30;
    double action_bound = 3.0;
    double noise_theta = 0.15;
    double noise_sigma = 0.2;
    std::uint64_t seed = 0;
    RewardSpec reward;
    NormScales norm;
    double dt = kSampleInterval;
};

// Main and target actor/critic networks with their optimizer state. The
// critic consumes the normalized state concatenated with the action.
struct ActorCritic {
    MlpParams actor;
    MlpParams critic;
    MlpParams actor_target;
    MlpParams critic_target;
    AdamState actor_adam;
    AdamState critic_adam;
};

ActorCritic make_networks(const TrainConfig& config);

// Reusable buffers for the update steps; one instance per training thread.
struct UpdateScratch {
    ForwardCache actor_cache;
    ForwardCache critic_cache;
    ForwardCache target_actor_cache;
    ForwardCache target_critic_cache;
    Gradients critic_grads;
    Gradients actor_grads;
    Gradients discard_grads;
    std::vector<double> critic_input;
    std::vector<double> critic_input_grad;
    std::vector<double> targets;
    std::vector<Transition> batch;
};

// One Adam step on the mean-squared Bellman error; returns the pre-step
// loss. Targets bootstrap through the target networks and drop the
// discounted term on terminal transitions.
double critic_update(ActorCritic& nets, std::span<const Transition> batch,
                     double gamma, UpdateScratch& scratch);

// One gradient-ascent Adam step on the sampled policy gradient; the critic
// is read but never modified. Returns the pre-step mean Q over the batch.
double actor_update(ActorCritic& nets, std::span<const Transition> batch,
                    UpdateScratch& scratch);

struct EpisodePoint {
    int episode = 0;
    double train_reward = 0.0;  // mean step reward under exploration noise
    double eval_reward = 0.0;   // noise-free mean step reward on eval events
};

struct TrainResult {
    Checkpoint best;
    int best_episode = 0;
    double best_eval_reward = 0.0;
    std::vector<EpisodePoint> curve;
    Checkpoint last;
};

using EpisodeHook = std::function<void(const EpisodePoint&)>;
using TransitionHook =
    std::function<void(int episode, int event_index, const Transition&)>;

// Full training loop: per episode one sequential pass over all training
// events; per step an exploratory action, an environment step, a buffer
// push and (once the buffer holds a minibatch) a critic update, an actor
// update and soft target updates. After each episode the actor is scored
// noise-free on the eval events and the best-scoring networks are kept.
TrainResult train(const std::vector<CfEvent>& train_events, const TrainConfig& config,
                  const std::vector<CfEvent>& eval_events,
                  const EpisodeHook& on_episode = nullptr,
                  const TransitionHook& on_transition = nullptr);

// Noise-free mean step reward of the actor over the given events. Per-event
// sums are reduced in event order, so the result does not depend on the
// number of worker threads.
double evaluate_mean_step_reward(const MlpParams& actor,
                                 const std::vector<CfEvent>& events,
                                 const TrainConfig& config);

// Deterministic greedy policy for a trained actor.
class ActorPolicy {
public:
    ActorPolicy(const MlpParams& actor, NormScales norm) : actor_(&actor), norm_(norm) {}
    double operator()(const CfEvent&, const CfState& state) const;

private:
    const MlpParams* actor_;
    NormScales norm_;
};

void write_curve_file(const std::filesystem::path& path,
                      const std::vector<EpisodePoint>& curve);

}  // namespace cfrl
