#include "cfrl/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cfrl/errors.hpp"
#include "cfrl/rng.hpp"

namespace cfrl {

namespace {

constexpr double kVehicleLength = 4.5;
constexpr double kTargetHeadway = 1.3;
constexpr double kGapGain = 0.25;
constexpr double kSpeedGain = 0.8;
constexpr double kActionBound = 3.0;

std::vector<double> piecewise_speed_profile(int n, Rng& rng, const SyntheticConfig& cfg) {
    std::vector<double> v(static_cast<std::size_t>(n));
    v[0] = rng.uniform(cfg.min_speed, cfg.max_speed);
    int i = 0;
    while (i < n - 1) {
        const int hold = static_cast<int>(std::lround(rng.uniform(3.0, 6.0) / cfg.dt));
        for (int k = 0; k < hold && i < n - 1; ++k, ++i) v[i + 1] = v[i];
        if (i >= n - 1) break;
        const double target =
            std::clamp(v[static_cast<std::size_t>(i)] + rng.uniform(-4.0, 4.0), 4.0, 20.0);
        const int ramp = static_cast<int>(std::lround(rng.uniform(2.0, 4.0) / cfg.dt));
        const double slope =
            (target - v[static_cast<std::size_t>(i)]) / (static_cast<double>(ramp) * cfg.dt);
        for (int k = 0; k < ramp && i < n - 1; ++k, ++i) v[i + 1] = v[i] + slope * cfg.dt;
    }
    return v;
}

std::vector<double> sinusoid_speed_profile(int n, Rng& rng, const SyntheticConfig& cfg) {
    std::vector<double> v(static_cast<std::size_t>(n));
    const double v0 = rng.uniform(cfg.min_speed, cfg.max_speed);
    const double amplitude = rng.uniform(1.0, std::min(3.0, v0 - 4.0));
    const double period = rng.uniform(10.0, 25.0);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double omega = 2.0 * std::numbers::pi / period;
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] =
            v0 + amplitude * std::sin(omega * static_cast<double>(i) * cfg.dt + phase);
    }
    return v;
}

CfEvent build_event(int index, const std::vector<double>& leader_speed,
                    double initial_headway, const SyntheticConfig& cfg) {
    const int n = static_cast<int>(leader_speed.size());
    const double dt = cfg.dt;
    const int leader_vid = 2 * index + 1;
    const int follower_vid = 2 * index + 2;

    std::vector<double> leader_pos(static_cast<std::size_t>(n));
    leader_pos[0] = 200.0;
    for (int i = 0; i + 1 < n; ++i) {
        leader_pos[i + 1] =
            leader_pos[i] + 0.5 * (leader_speed[i] + leader_speed[i + 1]) * dt;
    }

    std::vector<double> fv(static_cast<std::size_t>(n));
    std::vector<double> fp(static_cast<std::size_t>(n));
    std::vector<double> fa(static_cast<std::size_t>(n));
    fv[0] = leader_speed[0];
    fp[0] = leader_pos[0] - kVehicleLength - initial_headway * fv[0];

    for (int i = 0; i + 1 < n; ++i) {
        const double gap = leader_pos[i] - fp[i] - kVehicleLength;
        const double dv = leader_speed[i] - fv[i];
        const double a = std::clamp(kGapGain * (gap - kTargetHeadway * fv[i]) + kSpeedGain * dv,
                                    -kActionBound, kActionBound);
        fa[static_cast<std::size_t>(i)] = a;
        fv[i + 1] = std::max(0.0, fv[i] + a * dt);
        fp[i + 1] = fp[i] + 0.5 * (fv[i] + fv[i + 1]) * dt;
    }
    fa[static_cast<std::size_t>(n - 1)] = n > 1 ? fa[static_cast<std::size_t>(n - 2)] : 0.0;

    CfEvent e;
    e.event_id = index;
    e.leader.resize(static_cast<std::size_t>(n));
    e.follower.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double la = i + 1 < n ? (leader_speed[i + 1] - leader_speed[i]) / dt
                          : (n > 1 ? (leader_speed[n - 1] - leader_speed[n - 2]) / dt : 0.0);
        e.leader[static_cast<std::size_t>(i)] =
            TrajectorySample{t, leader_pos[i], leader_speed[i], la, 1, leader_vid, 0,
                             kVehicleLength};
        e.follower[static_cast<std::size_t>(i)] =
            TrajectorySample{t, fp[i], fv[i], fa[static_cast<std::size_t>(i)], 1,
                             follower_vid, leader_vid, kVehicleLength};
    }
    e.duration = static_cast<double>(n) * dt;
    return e;
}

}  // namespace

std::vector<CfEvent> make_synthetic_fleet(int count, std::uint64_t seed,
                                          const SyntheticConfig& config) {
    if (count < 0) throw ConfigError("make_synthetic_fleet: negative count");
    if (config.min_samples < 2 || config.max_samples < config.min_samples) {
        throw ConfigError("make_synthetic_fleet: bad sample range");
    }

    // structural checks only; duration is guaranteed by the sample range
    ExtractionConfig validation;
    validation.min_duration = 0.0;
    validation.dt = config.dt;

    std::vector<CfEvent> events;
    events.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        CfEvent event;
        bool ok = false;
        for (int attempt = 0; attempt < 16 && !ok; ++attempt) {
            Rng rng = Rng::stream(seed, 0x100 + static_cast<std::uint64_t>(k) * 16 +
                                            static_cast<std::uint64_t>(attempt));
            const int n = config.min_samples +
                          static_cast<int>(rng.uniform_index(static_cast<std::size_t>(
                              config.max_samples - config.min_samples + 1)));
            const std::vector<double> leader = k % 2 == 0
                                                   ? piecewise_speed_profile(n, rng, config)
                                                   : sinusoid_speed_profile(n, rng, config);
            const double z = rng.gaussian();
            const double headway =
                std::clamp(std::exp(config.headway_mu + config.headway_sigma * z),
                           config.min_initial_headway, config.max_initial_headway);
            event = build_event(k, leader, headway, config);
            ok = validate_event(event, validation).empty();
        }
        if (!ok) {
            throw NumericError("make_synthetic_fleet: could not generate a valid event");
        }
        events.push_back(std::move(event));
    }
    return events;
}

}  // namespace cfrl
