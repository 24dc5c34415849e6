#include "cfrl/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cfrl/ddpg.hpp"
#include "cfrl/env.hpp"
#include "cfrl/errors.hpp"
#include "cfrl/lognormal.hpp"
#include "cfrl/reward.hpp"

namespace cfrl {

namespace {

// Below this magnitude a central difference of a double-precision forward
// pass is dominated by rounding noise, so the comparison switches from
// relative to absolute.
constexpr double kFdDenomFloor = 1e-4;

double rel_error(double analytic, double fd) {
    const double denom = std::max({std::abs(analytic), std::abs(fd), kFdDenomFloor});
    return std::abs(analytic - fd) / denom;
}

}  // namespace

double gradient_rel_error_vs_fd(const MlpParams& params, std::span<const double> input,
                                std::span<const double> analytic_theta_grad,
                                std::span<const double> analytic_input_grad,
                                double fd_step) {
    if (params.output_dim != 1) {
        throw ConfigError("gradient check expects a scalar-output network");
    }
    MlpParams probe = params;
    std::vector<double> x(input.begin(), input.end());
    double max_err = 0.0;

    for (std::size_t i = 0; i < probe.theta.size(); ++i) {
        const double saved = probe.theta[i];
        probe.theta[i] = saved + fd_step;
        const double up = forward_scalar(probe, x);
        probe.theta[i] = saved - fd_step;
        const double down = forward_scalar(probe, x);
        probe.theta[i] = saved;
        const double fd = (up - down) / (2.0 * fd_step);
        max_err = std::max(max_err, rel_error(analytic_theta_grad[i], fd));
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double saved = x[j];
        x[j] = saved + fd_step;
        const double up = forward_scalar(params, x);
        x[j] = saved - fd_step;
        const double down = forward_scalar(params, x);
        x[j] = saved;
        const double fd = (up - down) / (2.0 * fd_step);
        max_err = std::max(max_err, rel_error(analytic_input_grad[j], fd));
    }
    return max_err;
}

double gradient_check_max_error(const MlpParams& params, std::span<const double> input,
                                double fd_step) {
    ForwardCache cache;
    forward(params, input, cache);
    Gradients grads = make_gradients(params);
    std::vector<double> input_grad(input.size(), 0.0);
    const double one = 1.0;
    backward(params, cache, std::span<const double>(&one, 1), grads, &input_grad);
    return gradient_rel_error_vs_fd(params, input, grads, input_grad, fd_step);
}

namespace {

SelftestResult check_gradients(std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        MlpParams actor = init_mlp(3, 30, 1, OutputActivation::tanh_scaled, rng);
        MlpParams critic = init_mlp(4, 30, 1, OutputActivation::linear, rng);
        std::vector<double> sa(3), sc(4);
        for (auto& v : sa) v = rng.uniform(-1.0, 1.0);
        for (auto& v : sc) v = rng.uniform(-1.0, 1.0);
        worst = std::max(worst, gradient_check_max_error(actor, sa));
        worst = std::max(worst, gradient_check_max_error(critic, sc));
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "max relative error %.3g", worst);
    return {"gradient_check", worst < 1e-6, detail};
}

SelftestResult check_adam() {
    MlpParams p;
    p.input_dim = 1;
    p.hidden_dim = 1;
    p.output_dim = 1;
    p.theta.assign(p.parameter_count(), 0.0);
    AdamState adam = make_adam(p, 0.001);
    Gradients g(p.parameter_count(), 1.0);
    adam_step(p, g, adam);
    const double expected = -0.001 / (1.0 + 1e-8);
    const double err = std::abs(p.theta[0] - expected);
    char detail[96];
    std::snprintf(detail, sizeof(detail), "first-step delta error %.3g", err);
    return {"adam_step", err < 1e-15 && adam.timestep == 1, detail};
}

CfEvent constant_accel_event(int samples, double leader_v0, double leader_acc,
                             double follower_v0, double follower_acc, double gap0) {
    const double dt = kSampleInterval;
    const double length = 4.5;
    CfEvent e;
    e.leader.resize(static_cast<std::size_t>(samples));
    e.follower.resize(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double lv = leader_v0 + leader_acc * t;
        const double fv = follower_v0 + follower_acc * t;
        const double lp = 100.0 + gap0 + length + leader_v0 * t + 0.5 * leader_acc * t * t;
        const double fp = 100.0 + follower_v0 * t + 0.5 * follower_acc * t * t;
        e.leader[static_cast<std::size_t>(i)] =
            TrajectorySample{t, lp, lv, leader_acc, 1, 1, 0, length};
        e.follower[static_cast<std::size_t>(i)] =
            TrajectorySample{t, fp, fv, follower_acc, 1, 2, 1, length};
    }
    e.duration = static_cast<double>(samples) * dt;
    return e;
}

SelftestResult check_kinematics() {
    const int steps = 1000;
    const double leader_v0 = 20.0, leader_acc = -0.05;
    const double follower_v0 = 20.0, follower_acc = -0.1;
    const double gap0 = 30.0;
    const CfEvent event =
        constant_accel_event(steps + 1, leader_v0, leader_acc, follower_v0, follower_acc, gap0);

    const EnvConfig config;
    CfState s = env_reset(event);
    double worst = 0.0;
    for (int k = 1; k <= steps; ++k) {
        const StepOutcome out = env_step(s, follower_acc, event, config);
        const double t = static_cast<double>(k) * config.dt;
        const double closed = gap0 + (leader_v0 - follower_v0) * t +
                              0.5 * (leader_acc - follower_acc) * t * t;
        worst = std::max(worst, std::abs(out.next_state.gap - closed) / static_cast<double>(k));
        s = out.next_state;
        if (out.terminal) break;
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "max per-step gap error %.3g", worst);
    return {"kinematics_trapezoid", worst < 1e-9, detail};
}

SelftestResult check_ou_statistics(std::uint64_t seed) {
    Rng rng = Rng::stream(seed, 77);
    OuNoise noise;
    const std::size_t n = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = noise.sample(rng);
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sum_sq / static_cast<double>(n) - mean * mean;
    const double stddev = std::sqrt(var);
    const double expected_std = noise.sigma / std::sqrt(noise.theta * (2.0 - noise.theta));
    const bool ok = std::abs(mean) < 0.02 &&
                    std::abs(stddev - expected_std) < 0.02 * expected_std;
    char detail[96];
    std::snprintf(detail, sizeof(detail), "mean %.4f std %.4f (expect 0 / %.4f)", mean,
                  stddev, expected_std);
    return {"ou_statistics", ok, detail};
}

SelftestResult check_lognormal_fit(std::uint64_t seed) {
    Rng rng = Rng::stream(seed, 78);
    const LognormalParams truth{0.4226, 0.4365};
    std::vector<double> samples(100000);
    for (auto& s : samples) s = std::exp(truth.mu + truth.sigma * rng.gaussian());
    const LognormalParams fit = fit_lognormal(samples);
    const bool ok =
        std::abs(fit.mu - truth.mu) < 0.02 && std::abs(fit.sigma - truth.sigma) < 0.02;
    char detail[96];
    std::snprintf(detail, sizeof(detail), "mu %.4f sigma %.4f", fit.mu, fit.sigma);
    return {"lognormal_fit_recovery", ok, detail};
}

SelftestResult check_reward_anchors() {
    const LognormalParams fit{0.4226, 0.4365};
    const double f_headway = headway_feature(1.3, fit);
    const double f_jerk = jerk_feature(60.0);
    const double f_ttc_limit = ttc_feature(7.0);
    const double f_ttc_half = ttc_feature(3.5);
    const bool ok = std::abs(f_headway - 0.657) < 0.01 && f_jerk == 1.0 &&
                    f_ttc_limit == 0.0 &&
                    std::abs(f_ttc_half - std::log(0.5)) < 1e-12;
    char detail[96];
    std::snprintf(detail, sizeof(detail), "F_headway(1.3)=%.4f F_jerk(60)=%.1f", f_headway,
                  f_jerk);
    return {"reward_anchors", ok, detail};
}

}  // namespace

std::vector<SelftestResult> run_selftest(std::uint64_t seed) {
    std::vector<SelftestResult> results;
    results.push_back(check_reward_anchors());
    results.push_back(check_adam());
    results.push_back(check_kinematics());
    results.push_back(check_gradients(seed));
    results.push_back(check_ou_statistics(seed));
    results.push_back(check_lognormal_fit(seed));
    return results;
}

}  // namespace cfrl
