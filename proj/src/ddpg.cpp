#include "cfrl/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "cfrl/errors.hpp"

namespace cfrl {

namespace {

// Stream ids carving independent RNG sequences out of one master seed.
constexpr std::uint64_t kActorInitStream = 1;
constexpr std::uint64_t kCriticInitStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr std::uint64_t kSampleStream = 4;

void fill_critic_input(std::vector<double>& input, const std::array<double, 3>& state,
                       double action) {
    input.resize(4);
    input[0] = state[0];
    input[1] = state[1];
    input[2] = state[2];
    input[3] = action;
}

}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
    data_.resize(capacity);
}

void ReplayBuffer::push(const Transition& t) {
    data_[head_] = t;
    head_ = (head_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    return data_[(head_ + capacity_ - size_ + i) % capacity_];
}

void ReplayBuffer::sample(std::size_t n, Rng& rng, std::vector<Transition>& out) const {
    if (size_ < n) {
        throw ConfigError("replay buffer holds fewer transitions than requested");
    }
    out.clear();
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.push_back(at(rng.uniform_index(size_)));
    }
}

ActorCritic make_networks(const TrainConfig& config) {
    Rng actor_rng = Rng::stream(config.seed, kActorInitStream);
    Rng critic_rng = Rng::stream(config.seed, kCriticInitStream);
    ActorCritic nets;
    nets.actor = init_mlp(3, config.hidden_dim, 1, OutputActivation::tanh_scaled,
                          actor_rng, config.action_bound);
    nets.critic = init_mlp(4, config.hidden_dim, 1, OutputActivation::linear, critic_rng);
    nets.actor_target = nets.actor;
    nets.critic_target = nets.critic;
    nets.actor_adam = make_adam(nets.actor, config.actor_lr);
    nets.critic_adam = make_adam(nets.critic, config.critic_lr);
    return nets;
}

double critic_update(ActorCritic& nets, std::span<const Transition> batch,
                     double gamma, UpdateScratch& scratch) {
    if (batch.empty()) throw ConfigError("critic_update: empty batch");
    const auto n = batch.size();

    scratch.targets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Transition& t = batch[i];
        double y = t.reward;
        if (!t.terminal) {
            forward(nets.actor_target, t.next_state_norm, scratch.target_actor_cache);
            const double next_action = scratch.target_actor_cache.output[0];
            fill_critic_input(scratch.critic_input, t.next_state_norm, next_action);
            forward(nets.critic_target, scratch.critic_input, scratch.target_critic_cache);
            y += gamma * scratch.target_critic_cache.output[0];
        }
        if (!std::isfinite(y)) {
            throw NumericError("critic_update: non-finite target for transition " +
                               std::to_string(i));
        }
        scratch.targets[i] = y;
    }

    scratch.critic_grads.assign(nets.critic.parameter_count(), 0.0);
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Transition& t = batch[i];
        fill_critic_input(scratch.critic_input, t.state_norm, t.action);
        forward(nets.critic, scratch.critic_input, scratch.critic_cache);
        const double diff = scratch.critic_cache.output[0] - scratch.targets[i];
        loss += diff * diff;
        const double out_grad = 2.0 * diff * inv_n;
        backward(nets.critic, scratch.critic_cache, std::span<const double>(&out_grad, 1),
                 scratch.critic_grads);
    }
    loss *= inv_n;

    adam_step(nets.critic, scratch.critic_grads, nets.critic_adam);
    return loss;
}

double actor_update(ActorCritic& nets, std::span<const Transition> batch,
                    UpdateScratch& scratch) {
    if (batch.empty()) throw ConfigError("actor_update: empty batch");
    const auto n = batch.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    scratch.actor_grads.assign(nets.actor.parameter_count(), 0.0);
    scratch.discard_grads.assign(nets.critic.parameter_count(), 0.0);

    double mean_q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Transition& t = batch[i];
        forward(nets.actor, t.state_norm, scratch.actor_cache);
        const double action = scratch.actor_cache.output[0];
        fill_critic_input(scratch.critic_input, t.state_norm, action);
        forward(nets.critic, scratch.critic_input, scratch.critic_cache);
        mean_q += scratch.critic_cache.output[0];

        scratch.critic_input_grad.assign(4, 0.0);
        const double one = 1.0;
        backward(nets.critic, scratch.critic_cache, std::span<const double>(&one, 1),
                 scratch.discard_grads, &scratch.critic_input_grad);
        const double dq_da = scratch.critic_input_grad[3];

        const double out_grad = dq_da * inv_n;
        backward(nets.actor, scratch.actor_cache, std::span<const double>(&out_grad, 1),
                 scratch.actor_grads);
    }
    mean_q *= inv_n;

    // ascent on mean Q
    for (double& g : scratch.actor_grads) g = -g;
    adam_step(nets.actor, scratch.actor_grads, nets.actor_adam);
    return mean_q;
}

double ActorPolicy::operator()(const CfEvent&, const CfState& state) const {
    return forward_scalar(*actor_, normalize_state(state, norm_));
}

double evaluate_mean_step_reward(const MlpParams& actor,
                                 const std::vector<CfEvent>& events,
                                 const TrainConfig& config) {
    std::vector<double> sums(events.size(), 0.0);
    std::vector<std::size_t> counts(events.size(), 0);
    const EnvConfig env_cfg{config.reward, config.dt};

#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        ForwardCache cache;
#ifdef _OPENMP
#pragma omp for schedule(dynamic)
#endif
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(events.size()); ++i) {
            const CfEvent& event = events[static_cast<std::size_t>(i)];
            if (event.size() < 2) continue;
            double sum = 0.0;
            std::size_t steps = 0;
            CfState s = env_reset(event);
            while (true) {
                forward(actor, normalize_state(s, config.norm), cache);
                const double a = std::clamp(cache.output[0], -config.action_bound,
                                            config.action_bound);
                const StepOutcome out = env_step(s, a, event, env_cfg);
                sum += out.reward.total;
                ++steps;
                if (out.terminal) break;
                s = out.next_state;
            }
            sums[static_cast<std::size_t>(i)] = sum;
            counts[static_cast<std::size_t>(i)] = steps;
        }
    }

    double total = 0.0;
    std::size_t steps = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        total += sums[i];
        steps += counts[i];
    }
    return steps > 0 ? total / static_cast<double>(steps) : 0.0;
}

namespace {

Checkpoint snapshot_networks(const ActorCritic& nets, const TrainConfig& config,
                             int episode, double eval_reward) {
    Checkpoint ckpt;
    ckpt.networks.emplace_back("actor", nets.actor);
    ckpt.networks.emplace_back("critic", nets.critic);
    ckpt.networks.emplace_back("actor_target", nets.actor_target);
    ckpt.networks.emplace_back("critic_target", nets.critic_target);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", eval_reward);
    ckpt.metadata["episode"] = std::to_string(episode);
    ckpt.metadata["eval_reward"] = buf;
    ckpt.metadata["seed"] = std::to_string(config.seed);
    return ckpt;
}

}  // namespace

TrainResult train(const std::vector<CfEvent>& train_events, const TrainConfig& config,
                  const std::vector<CfEvent>& eval_events, const EpisodeHook& on_episode,
                  const TransitionHook& on_transition) {
    if (train_events.empty()) throw DataError("train: no training events");
    if (eval_events.empty()) {
        throw ConfigError("train: eval events are required for checkpoint selection");
    }
    bool any_usable = false;
    for (const auto& e : train_events) {
        if (e.size() >= 2) {
            any_usable = true;
            break;
        }
    }
    if (!any_usable) throw DataError("train: all events are too short to simulate");

    ActorCritic nets = make_networks(config);
    Rng noise_rng = Rng::stream(config.seed, kNoiseStream);
    Rng sample_rng = Rng::stream(config.seed, kSampleStream);
    ReplayBuffer buffer(config.buffer_capacity);
    UpdateScratch scratch;
    const EnvConfig env_cfg{config.reward, config.dt};

    TrainResult result;
    result.best_eval_reward = -std::numeric_limits<double>::infinity();

    if (config.episodes == 0) {
        const double r = evaluate_mean_step_reward(nets.actor, eval_events, config);
        result.best = snapshot_networks(nets, config, 0, r);
        result.last = result.best;
        result.best_eval_reward = r;
        result.best_episode = 0;
        return result;
    }

    double last_eval = 0.0;
    for (int episode = 1; episode <= config.episodes; ++episode) {
        OuNoise noise;
        noise.theta = config.noise_theta;
        noise.sigma = config.noise_sigma;

        double reward_sum = 0.0;
        std::size_t steps = 0;

        for (std::size_t ei = 0; ei < train_events.size(); ++ei) {
            const CfEvent& event = train_events[ei];
            if (event.size() < 2) continue;
            CfState s = env_reset(event);
            while (true) {
                const auto s_norm = normalize_state(s, config.norm);
                forward(nets.actor, s_norm, scratch.actor_cache);
                const double a =
                    std::clamp(scratch.actor_cache.output[0] + noise.sample(noise_rng),
                               -config.action_bound, config.action_bound);
                const StepOutcome out = env_step(s, a, event, env_cfg);

                Transition t;
                t.state = {s.follower_speed, s.relative_speed, s.gap};
                t.state_norm = s_norm;
                t.action = a;
                t.reward = out.reward.total;
                t.next_state = {out.next_state.follower_speed,
                                out.next_state.relative_speed, out.next_state.gap};
                t.next_state_norm = normalize_state(out.next_state, config.norm);
                t.terminal = out.terminal;
                buffer.push(t);
                if (on_transition) on_transition(episode, static_cast<int>(ei), t);

                reward_sum += t.reward;
                ++steps;

                if (buffer.size() >= static_cast<std::size_t>(config.minibatch)) {
                    buffer.sample(static_cast<std::size_t>(config.minibatch), sample_rng,
                                  scratch.batch);
                    critic_update(nets, scratch.batch, config.gamma, scratch);
                    actor_update(nets, scratch.batch, scratch);
                    soft_update(nets.critic_target, nets.critic, config.tau);
                    soft_update(nets.actor_target, nets.actor, config.tau);
                }

                if (out.terminal) break;
                s = out.next_state;
            }
        }

        last_eval = evaluate_mean_step_reward(nets.actor, eval_events, config);
        EpisodePoint pt{episode, steps > 0 ? reward_sum / static_cast<double>(steps) : 0.0,
                        last_eval};
        result.curve.push_back(pt);
        if (on_episode) on_episode(pt);

        if (last_eval > result.best_eval_reward) {
            result.best_eval_reward = last_eval;
            result.best_episode = episode;
            result.best = snapshot_networks(nets, config, episode, last_eval);
        }
    }

    result.last = snapshot_networks(nets, config, config.episodes, last_eval);
    return result;
}

void write_curve_file(const std::filesystem::path& path,
                      const std::vector<EpisodePoint>& curve) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (f == nullptr) {
        throw DataError("cannot open curve file for writing: " + path.string());
    }
    std::fprintf(f, "episode train_reward eval_reward\n");
    for (const auto& p : curve) {
        std::fprintf(f, "%d %.17g %.17g\n", p.episode, p.train_reward, p.eval_reward);
    }
    std::fclose(f);
}

}  // namespace cfrl
